#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ritree/ktree.hpp"
#include "ritree/represent.hpp"

namespace ritree {

struct ContingencyTable {
    // counts[cluster][label]
    std::vector<std::vector<std::uint64_t>> counts;
    std::uint64_t n = 0;

    void add(std::size_t cluster, std::size_t label);
};

// (1/n) * sum over clusters of the majority label count.
double micro_purity(const ContingencyTable& table);

// Size-weighted cluster entropy in bits, unnormalized:
// sum (n_c/n) * H_c, H_c = -sum p log2 p.
double micro_entropy(const ContingencyTable& table);

// k-means++-seeded Lloyd over the codebook centroids, weighted by
// cluster size; best SSE of `restarts` independent runs. Returns the
// cluster (0..k-1) of each codebook entry; identity when sizes match.
std::vector<std::uint32_t> reduce_codebook(std::span<const LevelEntry> codebook,
                                           std::size_t k, std::size_t restarts,
                                           std::mt19937_64& rng);

// Same reduction, but documents inherit their codebook entry's cluster.
std::unordered_map<std::string, std::uint32_t> reduce_to_k(
    std::span<const LevelEntry> codebook,
    std::span<const std::pair<std::string, std::size_t>> doc_assignments, std::size_t k,
    std::size_t restarts, std::mt19937_64& rng);

struct WelchResult {
    double t = 0.0;
    double df = 0.0;
    double p = 1.0;
};

// Welch t statistic with Welch–Satterthwaite degrees of freedom and a
// two-tailed Student-t p-value.
WelchResult welch_t_test(std::span<const double> a, std::span<const double> b);

struct EvalConfig {
    std::string config_id = "custom";
    Variant variant = Variant::unmodified;
    Repr repr = Repr::bm25;
    Reduce reduce = Reduce::ri;
    std::vector<std::size_t> dims = {1000};
    std::uint32_t seed_len = 10;
    std::size_t order = 50;
    std::size_t k = 15;
    std::size_t runs_tree = 20;
    std::size_t runs_reduce = 20;
    std::uint64_t rng_seed = 1;
    unsigned jobs = 1;

    void validate() const;
};

// Named A-E after the experiment grid: culling vs random indexing,
// content-only vs content+links, unmodified vs modified tree.
EvalConfig preset(char letter);

struct RunMeasurement {
    std::string config_id;
    std::size_t dims = 0;
    std::size_t tree_run = 0;
    std::size_t reduce_run = 0;
    double entropy = 0.0;
    double purity = 0.0;
};

struct ReportRow {
    std::string config_id;
    std::size_t dims = 0;
    double alpha = 0.0;  // mean micro entropy
    double beta = 0.0;   // std dev of entropy
    double gamma = 0.0;  // mean micro purity
    double delta = 0.0;  // std dev of purity
    std::size_t runs = 0;
};

struct ExperimentReport {
    std::vector<ReportRow> rows;
    std::vector<RunMeasurement> measurements;
};

// Full protocol: per configuration and dimensionality, build runs_tree
// trees (fresh document shuffle and fresh index vectors each time), run
// runs_reduce codebook reductions per tree, and score every outcome
// against the labels. Labeled RNG sub-streams make the whole report a
// pure function of each config's rng_seed.
ExperimentReport run_experiment(const Corpus& corpus, std::span<const EvalConfig> configs);
ExperimentReport run_experiment(const Corpus& corpus, const EvalConfig& config);

}  // namespace ritree
