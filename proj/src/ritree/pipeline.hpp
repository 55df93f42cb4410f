#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "ritree/evaluate.hpp"
#include "ritree/ktree.hpp"
#include "ritree/matrix.hpp"

namespace ritree {

struct EncodeOptions {
    Repr repr = Repr::bm25;
    Reduce reduce = Reduce::ri;
    std::size_t dims = 1000;
    std::uint32_t seed_len = 10;
    std::uint64_t rng_seed = 1;
};

// weighting -> optional culling or random indexing -> unit rows.
EncodedMatrix encode_pipeline(const Corpus& corpus, const EncodeOptions& opts);

struct BuildOptions {
    std::size_t order = 50;
    Variant variant = Variant::unmodified;
    std::uint64_t rng_seed = 1;
    bool shuffle = true;  // insertion order drawn from rng_seed
};

KTree build_tree(const EncodedMatrix& matrix, const BuildOptions& opts);

// doc_id<TAB>cluster_index, in left-to-right leaf order.
void save_assignments(const KTree& tree, std::ostream& out);

// Report TSV: config, dims, alpha, beta, gamma, delta, runs.
void save_report(const ExperimentReport& report, std::ostream& out);
// Per-run CSV: config,dims,tree_run,reduce_run,entropy,purity.
void save_runs_csv(const ExperimentReport& report, std::ostream& out);
std::vector<RunMeasurement> load_runs_csv(std::istream& in);
std::vector<RunMeasurement> load_runs_csv_file(const std::string& path);

struct CompareRow {
    std::size_t dims = 0;
    double mean_a = 0.0;
    double mean_b = 0.0;
    double t = 0.0;
    double p = 1.0;
    bool significant = false;  // p < 0.05
};

// Per-dimension Welch t-tests on micro purity between two per-run CSVs.
// Both must cover the same dimension set. Identical samples compare as
// t = 0, p = 1.
std::vector<CompareRow> compare_runs(const std::vector<RunMeasurement>& a,
                                     const std::vector<RunMeasurement>& b);
void save_compare(const std::vector<CompareRow>& rows, std::ostream& out);

// Writes via a temp file and rename so readers never see partial output.
void atomic_write_file(const std::string& path,
                       const std::function<void(std::ostream&)>& writer);

}  // namespace ritree
