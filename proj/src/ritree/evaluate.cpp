#include "ritree/evaluate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numeric>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include "ritree/kmeans.hpp"
#include "ritree/matrix.hpp"
#include "ritree/rng.hpp"

namespace ritree {

void ContingencyTable::add(std::size_t cluster, std::size_t label) {
    if (counts.size() <= cluster) counts.resize(cluster + 1);
    if (counts[cluster].size() <= label) counts[cluster].resize(label + 1, 0);
    counts[cluster][label] += 1;
    n += 1;
}

double micro_purity(const ContingencyTable& table) {
    if (table.n == 0) fail(Errc::empty_table, "micro_purity of an empty table");
    std::uint64_t majority_sum = 0;
    for (const auto& row : table.counts)
        if (!row.empty()) majority_sum += *std::max_element(row.begin(), row.end());
    return static_cast<double>(majority_sum) / static_cast<double>(table.n);
}

double micro_entropy(const ContingencyTable& table) {
    if (table.n == 0) fail(Errc::empty_table, "micro_entropy of an empty table");
    double total = 0.0;
    for (const auto& row : table.counts) {
        const std::uint64_t n_c = std::accumulate(row.begin(), row.end(), std::uint64_t{0});
        if (n_c == 0) continue;
        double h = 0.0;
        for (std::uint64_t c : row) {
            if (c == 0) continue;
            const double p = static_cast<double>(c) / static_cast<double>(n_c);
            h -= p * std::log2(p);
        }
        total += (static_cast<double>(n_c) / static_cast<double>(table.n)) * h;
    }
    return total;
}

std::vector<std::uint32_t> reduce_codebook(std::span<const LevelEntry> codebook,
                                           std::size_t k, std::size_t restarts,
                                           std::mt19937_64& rng) {
    if (codebook.size() < k)
        fail(Errc::too_few_clusters, "cannot reduce " + std::to_string(codebook.size()) +
                                         " codebook entries to k=" + std::to_string(k));
    std::vector<std::uint32_t> out(codebook.size());
    if (codebook.size() == k) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<std::uint32_t>(i);
        return out;
    }

    std::vector<DenseVector> points;
    std::vector<double> weights;
    points.reserve(codebook.size());
    for (const auto& e : codebook) {
        points.push_back(e.vector);
        weights.push_back(static_cast<double>(e.weight));
    }

    KMeansConfig config;
    config.k = k;
    config.seeding = Seeding::kmeanspp;
    config.policy = Policy::run_to_convergence;

    Partition best;
    bool have_best = false;
    for (std::size_t attempt = 0; attempt < std::max<std::size_t>(1, restarts); ++attempt) {
        Partition part = lloyd(points, weights, config, rng);
        if (!have_best || part.sse < best.sse) {
            best = std::move(part);
            have_best = true;
        }
    }
    return best.assignment;
}

std::unordered_map<std::string, std::uint32_t> reduce_to_k(
    std::span<const LevelEntry> codebook,
    std::span<const std::pair<std::string, std::size_t>> doc_assignments, std::size_t k,
    std::size_t restarts, std::mt19937_64& rng) {
    const auto clusters = reduce_codebook(codebook, k, restarts, rng);
    std::unordered_map<std::string, std::uint32_t> out;
    out.reserve(doc_assignments.size());
    for (const auto& [doc_id, cb_index] : doc_assignments)
        out[doc_id] = clusters[cb_index];
    return out;
}

WelchResult welch_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2)
        fail(Errc::degenerate_sample, "welch_t_test needs >= 2 values per sample");
    auto stats = [](std::span<const double> s) {
        const double n = static_cast<double>(s.size());
        const double mean = std::accumulate(s.begin(), s.end(), 0.0) / n;
        double var = 0.0;
        for (double x : s) var += (x - mean) * (x - mean);
        var /= n - 1.0;
        return std::pair{mean, var};
    };
    const auto [ma, va] = stats(a);
    const auto [mb, vb] = stats(b);
    if (va <= 0.0 && vb <= 0.0)
        fail(Errc::degenerate_sample, "welch_t_test: both samples have zero variance");

    const double sa = va / static_cast<double>(a.size());
    const double sb = vb / static_cast<double>(b.size());
    WelchResult r;
    r.t = (ma - mb) / std::sqrt(sa + sb);
    r.df = (sa + sb) * (sa + sb) /
           (sa * sa / (static_cast<double>(a.size()) - 1.0) +
            sb * sb / (static_cast<double>(b.size()) - 1.0));
    boost::math::students_t dist(r.df);
    r.p = 2.0 * boost::math::cdf(dist, -std::abs(r.t));
    return r;
}

void EvalConfig::validate() const {
    if (dims.empty()) fail(Errc::config, "no dimensionalities to evaluate");
    for (auto d : dims)
        if (d < 1) fail(Errc::config, "dims must be >= 1");
    if (order < 2) fail(Errc::config, "tree order must be >= 2");
    if (k < 1) fail(Errc::config, "k must be >= 1");
    if (runs_tree < 1 || runs_reduce < 1) fail(Errc::config, "runs must be >= 1");
    if (reduce == Reduce::cull && repr != Repr::bm25)
        fail(Errc::config, "culling is defined on the bm25 term space only");
}

EvalConfig preset(char letter) {
    EvalConfig c;
    c.config_id = std::string(1, letter);
    switch (letter) {
        case 'A':
            c.variant = Variant::unmodified;
            c.repr = Repr::bm25;
            c.reduce = Reduce::cull;
            break;
        case 'B':
            c.variant = Variant::unmodified;
            c.repr = Repr::bm25_lfidf;
            c.reduce = Reduce::ri;
            break;
        case 'C':
            c.variant = Variant::unmodified;
            c.repr = Repr::bm25;
            c.reduce = Reduce::ri;
            break;
        case 'D':
            c.variant = Variant::modified;
            c.repr = Repr::bm25_lfidf;
            c.reduce = Reduce::ri;
            break;
        case 'E':
            c.variant = Variant::modified;
            c.repr = Repr::bm25;
            c.reduce = Reduce::ri;
            break;
        default:
            fail(Errc::config, std::string("unknown preset '") + letter + "'");
    }
    return c;
}

namespace {

struct LabelSpace {
    std::vector<std::size_t> doc_label;  // doc ordinal -> label id
    std::size_t n_labels = 0;
};

LabelSpace label_space(const Corpus& corpus) {
    LabelSpace out;
    std::unordered_map<std::string, std::size_t> ids;
    out.doc_label.reserve(corpus.docs.size());
    for (const auto& doc : corpus.docs) {
        auto it = corpus.labels.find(doc.doc_id);
        if (it == corpus.labels.end())
            fail(Errc::missing_label, "no label for doc '" + doc.doc_id + "'");
        auto [pos, inserted] = ids.emplace(it->second, ids.size());
        out.doc_label.push_back(pos->second);
        (void)inserted;
    }
    out.n_labels = ids.size();
    return out;
}

// One tree build plus its runs_reduce reductions and scores.
std::vector<RunMeasurement> run_tree(const Corpus& corpus, const EvalConfig& config,
                                     const FullSpaceDocs& full, const LabelSpace& labels,
                                     std::size_t dims_index, std::size_t tree_run) {
    const std::size_t d = config.dims[dims_index];
    const std::uint64_t scope = rng::derive(config.rng_seed, config.config_id);
    const std::uint64_t tag =
        (static_cast<std::uint64_t>(dims_index) << 32) | static_cast<std::uint64_t>(tree_run);

    EncodedMatrix matrix = reduce_and_unitize(full, config.reduce, d, config.seed_len,
                                              rng::derive(scope, "ri", tag));

    std::vector<std::size_t> order(matrix.rows.size());
    std::iota(order.begin(), order.end(), 0);
    auto shuffle_rng = rng::engine(rng::derive(scope, "shuffle", tag));
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    KTree tree({config.order, config.variant, rng::derive(scope, "ktree", tag)});
    for (auto i : order) tree.insert(matrix.rows[i], matrix.doc_ids[i]);

    const auto codebook = tree.codebook();
    const auto doc_cb = tree.assignments();
    std::vector<std::size_t> doc_cluster_index(corpus.docs.size());
    for (const auto& [doc_id, cb] : doc_cb) doc_cluster_index[corpus.doc_ord(doc_id)] = cb;

    std::vector<RunMeasurement> out;
    out.reserve(config.runs_reduce);
    for (std::size_t reduce_run = 0; reduce_run < config.runs_reduce; ++reduce_run) {
        auto rng = rng::engine(
            rng::derive(scope, "kmeans++", tag * config.runs_reduce + reduce_run));
        const auto clusters = reduce_codebook(codebook, config.k, 1, rng);
        ContingencyTable table;
        for (std::size_t doc = 0; doc < corpus.docs.size(); ++doc)
            table.add(clusters[doc_cluster_index[doc]], labels.doc_label[doc]);
        RunMeasurement rm;
        rm.config_id = config.config_id;
        rm.dims = d;
        rm.tree_run = tree_run;
        rm.reduce_run = reduce_run;
        rm.entropy = micro_entropy(table);
        rm.purity = micro_purity(table);
        out.push_back(std::move(rm));
    }
    return out;
}

std::pair<double, double> mean_std(std::span<const double> xs) {
    const double n = static_cast<double>(xs.size());
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    if (xs.size() < 2) return {mean, 0.0};
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    return {mean, std::sqrt(var / (n - 1.0))};
}

}  // namespace

ExperimentReport run_experiment(const Corpus& corpus, std::span<const EvalConfig> configs) {
    ExperimentReport report;
    if (corpus.docs.empty()) fail(Errc::empty_input, "experiment over an empty corpus");
    const LabelSpace labels = label_space(corpus);

    for (const auto& config : configs) {
        config.validate();
        const FullSpaceDocs full = build_full_space(corpus, config.repr);

        for (std::size_t dims_index = 0; dims_index < config.dims.size(); ++dims_index) {
            std::vector<std::vector<RunMeasurement>> slots(config.runs_tree);
            const unsigned jobs =
                std::max(1u, std::min<unsigned>(config.jobs,
                                                static_cast<unsigned>(config.runs_tree)));
            if (jobs == 1) {
                for (std::size_t run = 0; run < config.runs_tree; ++run)
                    slots[run] = run_tree(corpus, config, full, labels, dims_index, run);
            } else {
                // Tree builds are independent given their derived seeds;
                // results land in per-run slots so the fold stays ordered.
                std::atomic<std::size_t> next{0};
                std::exception_ptr first_error;
                std::mutex error_mutex;
                std::vector<std::thread> workers;
                for (unsigned w = 0; w < jobs; ++w)
                    workers.emplace_back([&] {
                        for (;;) {
                            const std::size_t run = next.fetch_add(1);
                            if (run >= config.runs_tree) return;
                            try {
                                slots[run] =
                                    run_tree(corpus, config, full, labels, dims_index, run);
                            } catch (...) {
                                std::lock_guard<std::mutex> lock(error_mutex);
                                if (!first_error) first_error = std::current_exception();
                                return;
                            }
                        }
                    });
                for (auto& t : workers) t.join();
                if (first_error) std::rethrow_exception(first_error);
            }

            std::vector<double> purities, entropies;
            for (auto& slot : slots)
                for (auto& rm : slot) {
                    purities.push_back(rm.purity);
                    entropies.push_back(rm.entropy);
                    report.measurements.push_back(std::move(rm));
                }
            ReportRow row;
            row.config_id = config.config_id;
            row.dims = config.dims[dims_index];
            std::tie(row.alpha, row.beta) = mean_std(entropies);
            std::tie(row.gamma, row.delta) = mean_std(purities);
            row.runs = purities.size();
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

ExperimentReport run_experiment(const Corpus& corpus, const EvalConfig& config) {
    return run_experiment(corpus, std::span<const EvalConfig>(&config, 1));
}

}  // namespace ritree
