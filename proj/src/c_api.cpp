#define RITREE_API __attribute__((visibility("default")))

#include "ritree.h"

#include <cstdio>
#include <cstring>
#include <exception>
#include <memory>
#include <string>
#include <utility>

#include "ritree/evaluate.hpp"
#include "ritree/ktree.hpp"
#include "ritree/matrix.hpp"
#include "ritree/pipeline.hpp"
#include "ritree/randindex.hpp"
#include "ritree/represent.hpp"

struct ritree_corpus {
    ritree::Corpus corpus;
};
struct ritree_matrix {
    ritree::EncodedMatrix matrix;
};
struct ritree_registry {
    ritree::IndexVectorRegistry registry;
};
struct ritree_ktree {
    ritree::KTree tree;
};
struct ritree_report {
    ritree::ExperimentReport report;
};

namespace {

thread_local std::string g_last_error = "";

ritree_status to_status(ritree::Errc code) {
    return static_cast<ritree_status>(static_cast<int>(code));
}

template <typename F>
ritree_status wrap(F&& body) {
    try {
        body();
        return RITREE_OK;
    } catch (const ritree::Error& e) {
        g_last_error = e.what();
        return to_status(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return RITREE_E_INTERNAL;
    } catch (...) {
        g_last_error = "unknown failure";
        return RITREE_E_INTERNAL;
    }
}

ritree_status bad_argument(const char* message) {
    g_last_error = message;
    return RITREE_E_INVALID_ARGUMENT;
}

void copy_field(char* dst, std::size_t cap, const char* src) {
    std::snprintf(dst, cap, "%s", src);
}

}  // namespace

extern "C" {

const char* ritree_version(void) { return "1.0.0"; }

const char* ritree_status_name(ritree_status status) {
    if (status == RITREE_E_INVALID_ARGUMENT) return "invalid_argument";
    return ritree::errc_name(static_cast<ritree::Errc>(static_cast<int>(status)));
}

const char* ritree_last_error(void) { return g_last_error.c_str(); }

/* ---- corpus ---- */

ritree_status ritree_corpus_open(const char* corpus_path, const char* links_path,
                                 const char* labels_path, const char* stopwords_path,
                                 ritree_corpus** out) {
    if (!corpus_path || !out) return bad_argument("corpus_path and out are required");
    *out = nullptr;
    return wrap([&] {
        auto handle = std::make_unique<ritree_corpus>();
        handle->corpus = ritree::ingest_corpus_file(
            corpus_path, stopwords_path ? stopwords_path : "");
        if (links_path) ritree::load_links_file(handle->corpus, links_path);
        if (labels_path) ritree::load_labels_file(handle->corpus, labels_path);
        *out = handle.release();
    });
}

void ritree_corpus_close(ritree_corpus* corpus) { delete corpus; }

size_t ritree_corpus_docs(const ritree_corpus* corpus) {
    return corpus ? corpus->corpus.stats.n_docs : 0;
}

size_t ritree_corpus_terms(const ritree_corpus* corpus) {
    return corpus ? corpus->corpus.stats.n_terms : 0;
}

double ritree_corpus_avg_doc_len(const ritree_corpus* corpus) {
    return corpus ? corpus->corpus.stats.avg_doc_len : 0.0;
}

/* ---- encoding ---- */

ritree_status ritree_encode(const ritree_corpus* corpus, const char* repr,
                            const char* reduce, size_t dims, size_t seed_len,
                            uint64_t rng_seed, ritree_matrix** out) {
    if (!corpus || !repr || !reduce || !out)
        return bad_argument("corpus, repr, reduce and out are required");
    *out = nullptr;
    return wrap([&] {
        ritree::EncodeOptions opts;
        opts.repr = ritree::repr_from_string(repr);
        opts.reduce = ritree::reduce_from_string(reduce);
        opts.dims = dims;
        opts.seed_len = static_cast<std::uint32_t>(seed_len);
        opts.rng_seed = rng_seed;
        auto handle = std::make_unique<ritree_matrix>();
        handle->matrix = ritree::encode_pipeline(corpus->corpus, opts);
        *out = handle.release();
    });
}

ritree_status ritree_matrix_open(const char* path, ritree_matrix** out) {
    if (!path || !out) return bad_argument("path and out are required");
    *out = nullptr;
    return wrap([&] {
        auto handle = std::make_unique<ritree_matrix>();
        handle->matrix = ritree::load_matrix_file(path);
        *out = handle.release();
    });
}

ritree_status ritree_matrix_save(const ritree_matrix* matrix, const char* path) {
    if (!matrix || !path) return bad_argument("matrix and path are required");
    return wrap([&] {
        ritree::atomic_write_file(
            path, [&](std::ostream& out) { ritree::save_matrix(matrix->matrix, out); });
    });
}

void ritree_matrix_close(ritree_matrix* matrix) { delete matrix; }

size_t ritree_matrix_rows(const ritree_matrix* matrix) {
    return matrix ? matrix->matrix.rows.size() : 0;
}

size_t ritree_matrix_dims(const ritree_matrix* matrix) {
    return matrix ? matrix->matrix.dims : 0;
}

ritree_status ritree_matrix_row(const ritree_matrix* matrix, size_t index,
                                const double** values, const char** doc_id) {
    if (!matrix) return bad_argument("matrix is required");
    if (index >= matrix->matrix.rows.size()) return bad_argument("row index out of range");
    if (values) *values = matrix->matrix.rows[index].data();
    if (doc_id) *doc_id = matrix->matrix.doc_ids[index].c_str();
    return RITREE_OK;
}

/* ---- registry ---- */

ritree_status ritree_registry_create(size_t dims, size_t seed_len, uint64_t rng_seed,
                                     ritree_registry** out) {
    if (!out) return bad_argument("out is required");
    *out = nullptr;
    return wrap([&] {
        ritree::RiConfig config;
        config.r = static_cast<std::uint32_t>(dims);
        config.seed_len = static_cast<std::uint32_t>(seed_len);
        config.rng_seed = rng_seed;
        *out = new ritree_registry{ritree::IndexVectorRegistry(config)};
    });
}

ritree_status ritree_registry_open(const char* path, size_t dims, size_t seed_len,
                                   uint64_t rng_seed, ritree_registry** out) {
    if (!path || !out) return bad_argument("path and out are required");
    *out = nullptr;
    return wrap([&] {
        ritree::RiConfig config;
        config.r = static_cast<std::uint32_t>(dims);
        config.seed_len = static_cast<std::uint32_t>(seed_len);
        config.rng_seed = rng_seed;
        *out = new ritree_registry{ritree::IndexVectorRegistry::load_file(path, config)};
    });
}

void ritree_registry_close(ritree_registry* registry) { delete registry; }

size_t ritree_registry_size(const ritree_registry* registry) {
    return registry ? registry->registry.size() : 0;
}

ritree_status ritree_registry_save(const ritree_registry* registry, const char* path) {
    if (!registry || !path) return bad_argument("registry and path are required");
    return wrap([&] {
        ritree::atomic_write_file(
            path, [&](std::ostream& out) { registry->registry.save(out); });
    });
}

ritree_status ritree_registry_vector(ritree_registry* registry, const char* term,
                                     int64_t* entries, size_t cap, size_t* len) {
    if (!registry || !term || !entries || !len)
        return bad_argument("registry, term, entries and len are required");
    return wrap([&] {
        const auto& v = registry->registry.get_or_create(term);
        if (cap < v.entries.size())
            ritree::fail(ritree::Errc::config, "entry buffer too small");
        for (std::size_t i = 0; i < v.entries.size(); ++i) {
            const auto signed_pos = static_cast<int64_t>(v.entries[i].dim) + 1;
            entries[i] = v.entries[i].value > 0 ? signed_pos : -signed_pos;
        }
        *len = v.entries.size();
    });
}

/* ---- k-tree ---- */

ritree_status ritree_ktree_create(size_t order, const char* variant, uint64_t rng_seed,
                                  ritree_ktree** out) {
    if (!variant || !out) return bad_argument("variant and out are required");
    *out = nullptr;
    return wrap([&] {
        ritree::KTreeConfig config;
        config.order = order;
        config.variant = ritree::variant_from_string(variant);
        config.rng_seed = rng_seed;
        *out = new ritree_ktree{ritree::KTree(config)};
    });
}

void ritree_ktree_close(ritree_ktree* tree) { delete tree; }

ritree_status ritree_ktree_insert(ritree_ktree* tree, const double* vector, size_t dims,
                                  const char* doc_id) {
    if (!tree || !vector || !doc_id)
        return bad_argument("tree, vector and doc_id are required");
    return wrap([&] {
        ritree::DenseVector v(vector, vector + dims);
        tree->tree.insert(v, doc_id);
    });
}

ritree_status ritree_ktree_build(const ritree_matrix* matrix, size_t order,
                                 const char* variant, uint64_t rng_seed, int shuffle,
                                 ritree_ktree** out) {
    if (!matrix || !variant || !out)
        return bad_argument("matrix, variant and out are required");
    *out = nullptr;
    return wrap([&] {
        ritree::BuildOptions opts;
        opts.order = order;
        opts.variant = ritree::variant_from_string(variant);
        opts.rng_seed = rng_seed;
        opts.shuffle = shuffle != 0;
        *out = new ritree_ktree{ritree::build_tree(matrix->matrix, opts)};
    });
}

size_t ritree_ktree_depth(const ritree_ktree* tree) { return tree ? tree->tree.depth() : 0; }

uint64_t ritree_ktree_size(const ritree_ktree* tree) { return tree ? tree->tree.size() : 0; }

size_t ritree_ktree_dims(const ritree_ktree* tree) { return tree ? tree->tree.dim() : 0; }

ritree_status ritree_ktree_level_size(const ritree_ktree* tree, size_t level,
                                      size_t* out) {
    if (!tree || !out) return bad_argument("tree and out are required");
    return wrap([&] { *out = tree->tree.level(level).size(); });
}

ritree_status ritree_ktree_save(const ritree_ktree* tree, const char* path) {
    if (!tree || !path) return bad_argument("tree and path are required");
    return wrap([&] {
        ritree::atomic_write_file(path,
                                  [&](std::ostream& out) { tree->tree.save(out); });
    });
}

ritree_status ritree_ktree_open(const char* path, ritree_ktree** out) {
    if (!path || !out) return bad_argument("path and out are required");
    *out = nullptr;
    return wrap([&] { *out = new ritree_ktree{ritree::KTree::load_file(path)}; });
}

ritree_status ritree_ktree_save_assignments(const ritree_ktree* tree, const char* path) {
    if (!tree || !path) return bad_argument("tree and path are required");
    return wrap([&] {
        ritree::atomic_write_file(
            path, [&](std::ostream& out) { ritree::save_assignments(tree->tree, out); });
    });
}

ritree_status ritree_ktree_validate(const ritree_ktree* tree) {
    if (!tree) return bad_argument("tree is required");
    return wrap([&] { ritree::KTreeAudit{}.run(tree->tree); });
}

/* ---- evaluation ---- */

ritree_eval_opts ritree_eval_opts_default(void) {
    ritree_eval_opts opts;
    std::memset(&opts, 0, sizeof(opts));
    copy_field(opts.config_id, sizeof(opts.config_id), "custom");
    copy_field(opts.variant, sizeof(opts.variant), "unmodified");
    copy_field(opts.repr, sizeof(opts.repr), "bm25");
    copy_field(opts.reduce, sizeof(opts.reduce), "ri");
    opts.seed_len = 10;
    opts.order = 50;
    opts.k = 15;
    opts.runs_tree = 20;
    opts.runs_reduce = 20;
    opts.rng_seed = 1;
    opts.jobs = 1;
    return opts;
}

ritree_status ritree_eval_opts_preset(char letter, ritree_eval_opts* opts) {
    if (!opts) return bad_argument("opts is required");
    return wrap([&] {
        const ritree::EvalConfig c = ritree::preset(letter);
        copy_field(opts->config_id, sizeof(opts->config_id), c.config_id.c_str());
        copy_field(opts->variant, sizeof(opts->variant), ritree::variant_name(c.variant));
        copy_field(opts->repr, sizeof(opts->repr), ritree::repr_name(c.repr));
        copy_field(opts->reduce, sizeof(opts->reduce), ritree::reduce_name(c.reduce));
    });
}

ritree_status ritree_evaluate(const ritree_corpus* corpus, const ritree_eval_opts* opts,
                              ritree_report** out) {
    if (!corpus || !opts || !out) return bad_argument("corpus, opts and out are required");
    if (!opts->dims || opts->n_dims == 0) return bad_argument("opts->dims is required");
    *out = nullptr;
    return wrap([&] {
        ritree::EvalConfig config;
        config.config_id = opts->config_id;
        config.variant = ritree::variant_from_string(opts->variant);
        config.repr = ritree::repr_from_string(opts->repr);
        config.reduce = ritree::reduce_from_string(opts->reduce);
        config.dims.assign(opts->dims, opts->dims + opts->n_dims);
        config.seed_len = static_cast<std::uint32_t>(opts->seed_len);
        config.order = opts->order;
        config.k = opts->k;
        config.runs_tree = opts->runs_tree;
        config.runs_reduce = opts->runs_reduce;
        config.rng_seed = opts->rng_seed;
        config.jobs = opts->jobs;
        auto handle = std::make_unique<ritree_report>();
        handle->report = ritree::run_experiment(corpus->corpus, config);
        *out = handle.release();
    });
}

void ritree_report_close(ritree_report* report) { delete report; }

size_t ritree_report_rows(const ritree_report* report) {
    return report ? report->report.rows.size() : 0;
}

ritree_status ritree_report_row(const ritree_report* report, size_t index,
                                const char** config_id, size_t* dims, double* alpha,
                                double* beta, double* gamma, double* delta,
                                size_t* runs) {
    if (!report) return bad_argument("report is required");
    if (index >= report->report.rows.size()) return bad_argument("row index out of range");
    const auto& row = report->report.rows[index];
    if (config_id) *config_id = row.config_id.c_str();
    if (dims) *dims = row.dims;
    if (alpha) *alpha = row.alpha;
    if (beta) *beta = row.beta;
    if (gamma) *gamma = row.gamma;
    if (delta) *delta = row.delta;
    if (runs) *runs = row.runs;
    return RITREE_OK;
}

ritree_status ritree_report_save(const ritree_report* report, const char* tsv_path,
                                 const char* runs_csv_path) {
    if (!report || !tsv_path) return bad_argument("report and tsv_path are required");
    return wrap([&] {
        ritree::atomic_write_file(tsv_path, [&](std::ostream& out) {
            ritree::save_report(report->report, out);
        });
        if (runs_csv_path)
            ritree::atomic_write_file(runs_csv_path, [&](std::ostream& out) {
                ritree::save_runs_csv(report->report, out);
            });
    });
}

ritree_status ritree_compare(const char* runs_csv_a, const char* runs_csv_b,
                             const char* out_tsv) {
    if (!runs_csv_a || !runs_csv_b || !out_tsv)
        return bad_argument("both csv paths and out_tsv are required");
    return wrap([&] {
        const auto a = ritree::load_runs_csv_file(runs_csv_a);
        const auto b = ritree::load_runs_csv_file(runs_csv_b);
        const auto rows = ritree::compare_runs(a, b);
        ritree::atomic_write_file(
            out_tsv, [&](std::ostream& out) { ritree::save_compare(rows, out); });
    });
}

/* ---- metric primitives ---- */

ritree_status ritree_welch_t_test(const double* a, size_t len_a, const double* b,
                                  size_t len_b, double* t, double* p) {
    if (!a || !b || !t || !p) return bad_argument("a, b, t and p are required");
    return wrap([&] {
        const auto r = ritree::welch_t_test(std::span<const double>(a, len_a),
                                            std::span<const double>(b, len_b));
        *t = r.t;
        *p = r.p;
    });
}

namespace {

ritree::ContingencyTable table_from(const uint64_t* counts, size_t n_clusters,
                                    size_t n_labels) {
    ritree::ContingencyTable table;
    table.counts.resize(n_clusters);
    for (size_t c = 0; c < n_clusters; ++c) {
        table.counts[c].assign(counts + c * n_labels, counts + (c + 1) * n_labels);
        for (auto x : table.counts[c]) table.n += x;
    }
    return table;
}

}  // namespace

ritree_status ritree_micro_purity(const uint64_t* counts, size_t n_clusters,
                                  size_t n_labels, double* out) {
    if (!counts || !out) return bad_argument("counts and out are required");
    return wrap([&] { *out = ritree::micro_purity(table_from(counts, n_clusters, n_labels)); });
}

ritree_status ritree_micro_entropy(const uint64_t* counts, size_t n_clusters,
                                   size_t n_labels, double* out) {
    if (!counts || !out) return bad_argument("counts and out are required");
    return wrap([&] { *out = ritree::micro_entropy(table_from(counts, n_clusters, n_labels)); });
}

} /* extern "C" */
