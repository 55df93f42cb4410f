// Command-line front end for the ritree shared library. Everything here
// goes through the public C API in ritree.h.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ritree.h"

namespace {

struct CorpusGuard {
    ritree_corpus* handle = nullptr;
    ~CorpusGuard() { ritree_corpus_close(handle); }
};
struct MatrixGuard {
    ritree_matrix* handle = nullptr;
    ~MatrixGuard() { ritree_matrix_close(handle); }
};
struct KTreeGuard {
    ritree_ktree* handle = nullptr;
    ~KTreeGuard() { ritree_ktree_close(handle); }
};
struct ReportGuard {
    ritree_report* handle = nullptr;
    ~ReportGuard() { ritree_report_close(handle); }
};

[[noreturn]] void die(ritree_status status) {
    std::fprintf(stderr, "ritree: %s: %s\n", ritree_status_name(status),
                 ritree_last_error());
    std::exit(1);
}

void check(ritree_status status) {
    if (status != RITREE_OK) die(status);
}

const char* opt_path(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Random Indexing K-tree document clustering"};
    app.require_subcommand(1);

    // Shared pipeline configuration
    std::string corpus_path, links_path, labels_path, stopwords_path;
    std::string repr = "bm25", reduce = "ri", variant = "unmodified";
    std::string preset;
    std::size_t dims_single = 1000;
    std::vector<std::size_t> dims_list;
    std::size_t seed_len = 10, order = 50, k = 15;
    std::size_t runs_tree = 20, runs_reduce = 20;
    std::uint64_t rng_seed = 1;
    unsigned jobs = 1;

    auto* encode = app.add_subcommand("encode", "Weight and encode a corpus to a matrix");
    encode->add_option("--corpus", corpus_path, "corpus file")->required();
    encode->add_option("--links", links_path, "links file");
    encode->add_option("--stopwords", stopwords_path, "stop-word file");
    auto* encode_repr = encode->add_option("--repr", repr, "bm25 | bm25+lfidf");
    auto* encode_reduce = encode->add_option("--reduce", reduce, "none | cull | ri");
    encode->add_option("--dims", dims_single, "reduced dimensionality / kept terms");
    auto* encode_seed_len =
        encode->add_option("--seed-len", seed_len, "index vector non-zeros (ri only)");
    encode->add_option("--rng-seed", rng_seed, "root random seed")
        ->envname("RITREE_RNG_SEED");
    encode->add_option("--preset", preset, "configuration letter A..E");
    std::string encode_out;
    encode->add_option("--out", encode_out, "matrix output path")->required();

    auto* build = app.add_subcommand("build", "Build a K-tree over an encoded matrix");
    std::string matrix_path, tree_out, assignments_out;
    build->add_option("--matrix", matrix_path, "encoded matrix path")->required();
    build->add_option("--order", order, "tree order m");
    auto* build_variant = build->add_option("--variant", variant, "unmodified | modified");
    build->add_option("--rng-seed", rng_seed, "root random seed")
        ->envname("RITREE_RNG_SEED");
    build->add_option("--preset", preset, "configuration letter A..E");
    bool no_shuffle = false;
    build->add_flag("--no-shuffle", no_shuffle, "insert in file order");
    build->add_option("--out", tree_out, "tree dump output path")->required();
    build->add_option("--assignments", assignments_out, "cluster TSV output path");

    auto* evaluate = app.add_subcommand("evaluate", "Run the clustering experiment");
    evaluate->add_option("--corpus", corpus_path, "corpus file")->required();
    evaluate->add_option("--labels", labels_path, "labels file")->required();
    evaluate->add_option("--links", links_path, "links file");
    evaluate->add_option("--stopwords", stopwords_path, "stop-word file");
    auto* evaluate_repr = evaluate->add_option("--repr", repr, "bm25 | bm25+lfidf");
    auto* evaluate_reduce = evaluate->add_option("--reduce", reduce, "none | cull | ri");
    auto* evaluate_variant =
        evaluate->add_option("--variant", variant, "unmodified | modified");
    evaluate->add_option("--preset", preset, "configuration letter A..E");
    evaluate->add_option("--dims", dims_list, "dimensionalities to sweep")
        ->delimiter(',');
    auto* evaluate_seed_len =
        evaluate->add_option("--seed-len", seed_len, "index vector non-zeros (ri only)");
    evaluate->add_option("--order", order, "tree order m");
    evaluate->add_option("--k", k, "final cluster count");
    evaluate->add_option("--runs-tree", runs_tree, "tree builds per configuration");
    evaluate->add_option("--runs-reduce", runs_reduce, "reductions per tree");
    evaluate->add_option("--rng-seed", rng_seed, "root random seed")
        ->envname("RITREE_RNG_SEED");
    evaluate->add_option("--jobs", jobs, "parallel tree builds");
    std::string report_out, runs_out;
    evaluate->add_option("--out", report_out, "report TSV output path")->required();
    evaluate->add_option("--runs-out", runs_out, "per-run CSV output path");

    auto* compare = app.add_subcommand("compare", "Welch t-tests between two run CSVs");
    std::string runs_a, runs_b, compare_out;
    compare->add_option("runs_a", runs_a, "per-run CSV A")->required();
    compare->add_option("runs_b", runs_b, "per-run CSV B")->required();
    compare->add_option("--out", compare_out, "comparison TSV output path")->required();

    auto* audit = app.add_subcommand("audit", "Validate the invariants of a tree dump");
    std::string audit_in;
    audit->add_option("--in", audit_in, "tree dump path")->required();

    CLI11_PARSE(app, argc, argv);

    // Presets fill whatever the user did not set explicitly.
    ritree_eval_opts opts = ritree_eval_opts_default();
    if (!preset.empty()) {
        if (preset.size() != 1) {
            std::fprintf(stderr, "ritree: preset must be a single letter A..E\n");
            return 1;
        }
        check(ritree_eval_opts_preset(preset[0], &opts));
        auto apply = [](CLI::Option* option, std::string& value, const char* from_preset) {
            if (option == nullptr || option->count() == 0) value = from_preset;
        };
        if (encode->parsed()) {
            apply(encode_repr, repr, opts.repr);
            apply(encode_reduce, reduce, opts.reduce);
        } else if (build->parsed()) {
            apply(build_variant, variant, opts.variant);
        } else if (evaluate->parsed()) {
            apply(evaluate_repr, repr, opts.repr);
            apply(evaluate_reduce, reduce, opts.reduce);
            apply(evaluate_variant, variant, opts.variant);
        }
    }
    const bool uses_ri = reduce == "ri";

    if (encode->parsed()) {
        if (encode_seed_len->count() > 0 && !uses_ri) {
            std::fprintf(stderr,
                         "ritree: --seed-len only applies to --reduce ri (got %s)\n",
                         reduce.c_str());
            return 1;
        }
        CorpusGuard corpus;
        check(ritree_corpus_open(corpus_path.c_str(), opt_path(links_path), nullptr,
                                 opt_path(stopwords_path), &corpus.handle));
        MatrixGuard matrix;
        check(ritree_encode(corpus.handle, repr.c_str(), reduce.c_str(), dims_single,
                            seed_len, rng_seed, &matrix.handle));
        check(ritree_matrix_save(matrix.handle, encode_out.c_str()));
        std::printf("encoded %zu documents to %zu dimensions\n",
                    ritree_matrix_rows(matrix.handle), ritree_matrix_dims(matrix.handle));
        return 0;
    }

    if (build->parsed()) {
        MatrixGuard matrix;
        check(ritree_matrix_open(matrix_path.c_str(), &matrix.handle));
        KTreeGuard tree;
        check(ritree_ktree_build(matrix.handle, order, variant.c_str(), rng_seed,
                                 no_shuffle ? 0 : 1, &tree.handle));
        check(ritree_ktree_save(tree.handle, tree_out.c_str()));
        if (!assignments_out.empty())
            check(ritree_ktree_save_assignments(tree.handle, assignments_out.c_str()));
        std::printf("built depth-%zu tree over %llu vectors\n",
                    ritree_ktree_depth(tree.handle),
                    static_cast<unsigned long long>(ritree_ktree_size(tree.handle)));
        return 0;
    }

    if (evaluate->parsed()) {
        if (evaluate_seed_len->count() > 0 && !uses_ri) {
            std::fprintf(stderr,
                         "ritree: --seed-len only applies to --reduce ri (got %s)\n",
                         reduce.c_str());
            return 1;
        }
        if (dims_list.empty()) dims_list.push_back(dims_single);
        CorpusGuard corpus;
        check(ritree_corpus_open(corpus_path.c_str(), opt_path(links_path),
                                 labels_path.c_str(), opt_path(stopwords_path),
                                 &corpus.handle));
        std::snprintf(opts.variant, sizeof(opts.variant), "%s", variant.c_str());
        std::snprintf(opts.repr, sizeof(opts.repr), "%s", repr.c_str());
        std::snprintf(opts.reduce, sizeof(opts.reduce), "%s", reduce.c_str());
        opts.dims = dims_list.data();
        opts.n_dims = dims_list.size();
        opts.seed_len = seed_len;
        opts.order = order;
        opts.k = k;
        opts.runs_tree = runs_tree;
        opts.runs_reduce = runs_reduce;
        opts.rng_seed = rng_seed;
        opts.jobs = jobs;
        ReportGuard report;
        check(ritree_evaluate(corpus.handle, &opts, &report.handle));
        check(ritree_report_save(report.handle, report_out.c_str(), opt_path(runs_out)));
        for (size_t i = 0; i < ritree_report_rows(report.handle); ++i) {
            const char* config_id = nullptr;
            size_t dims = 0, runs = 0;
            double alpha = 0, beta = 0, gamma = 0, delta = 0;
            check(ritree_report_row(report.handle, i, &config_id, &dims, &alpha, &beta,
                                    &gamma, &delta, &runs));
            std::printf("%s dims=%zu purity=%.4f entropy=%.4f (%zu runs)\n", config_id,
                        dims, gamma, alpha, runs);
        }
        return 0;
    }

    if (compare->parsed()) {
        check(ritree_compare(runs_a.c_str(), runs_b.c_str(), compare_out.c_str()));
        std::printf("wrote %s\n", compare_out.c_str());
        return 0;
    }

    if (audit->parsed()) {
        KTreeGuard tree;
        check(ritree_ktree_open(audit_in.c_str(), &tree.handle));
        check(ritree_ktree_validate(tree.handle));
        std::printf("ok: depth=%zu n=%llu dims=%zu\n", ritree_ktree_depth(tree.handle),
                    static_cast<unsigned long long>(ritree_ktree_size(tree.handle)),
                    ritree_ktree_dims(tree.handle));
        return 0;
    }

    return 0;
}
