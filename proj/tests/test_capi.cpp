#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <string>

#include "ritree.h"
#include "support_files.hpp"

using testsupport::TempDir;
using testsupport::read_file;
using testsupport::write_file;

namespace {

struct Fixture {
    TempDir dir;
    std::string corpus_path, labels_path, links_path, stopwords_path;

    Fixture() {
        corpus_path = dir.file("corpus.tsv");
        labels_path = dir.file("labels.tsv");
        links_path = dir.file("links.tsv");
        stopwords_path = dir.file("stop.txt");
        write_file(corpus_path,
                   "d1\tapple:3 pear:2 the:9\n"
                   "d2\tapple:2 plum:2\n"
                   "d3\tpear:2 plum:3 banana:1\n"
                   "d4\tstone:3 iron:2\n"
                   "d5\tstone:2 iron:3\n");
        write_file(labels_path, "d1\tA\nd2\tA\nd3\tB\nd4\tB\nd5\tB\n");
        write_file(links_path, "d1\td2\nd4\td5\n");
        write_file(stopwords_path, "the\n");
    }
};

}  // namespace

TEST_CASE("version and status names") {
    CHECK(std::string(ritree_version()) == "1.0.0");
    CHECK(std::string(ritree_status_name(RITREE_OK)) == "ok");
    CHECK(std::string(ritree_status_name(RITREE_E_ZERO_VECTOR)) == "zero_vector");
    CHECK(std::string(ritree_status_name(RITREE_E_INVALID_ARGUMENT)) ==
          "invalid_argument");
}

TEST_CASE("corpus handle") {
    Fixture fx;
    ritree_corpus* corpus = nullptr;
    REQUIRE(ritree_corpus_open(fx.corpus_path.c_str(), fx.links_path.c_str(),
                               fx.labels_path.c_str(), fx.stopwords_path.c_str(),
                               &corpus) == RITREE_OK);
    CHECK(ritree_corpus_docs(corpus) == 5);
    CHECK(ritree_corpus_terms(corpus) == 6);  // "the" removed by stop list
    CHECK(ritree_corpus_avg_doc_len(corpus) == doctest::Approx(5.0));
    ritree_corpus_close(corpus);

    ritree_corpus* missing = nullptr;
    CHECK(ritree_corpus_open(fx.dir.file("nope.tsv").c_str(), nullptr, nullptr, nullptr,
                             &missing) == RITREE_E_IO);
    CHECK(std::string(ritree_last_error()).find("nope.tsv") != std::string::npos);
    CHECK(ritree_corpus_open(nullptr, nullptr, nullptr, nullptr, &missing) ==
          RITREE_E_INVALID_ARGUMENT);
}

TEST_CASE("encode, save, reload") {
    Fixture fx;
    ritree_corpus* corpus = nullptr;
    REQUIRE(ritree_corpus_open(fx.corpus_path.c_str(), nullptr, nullptr, nullptr,
                               &corpus) == RITREE_OK);

    ritree_matrix* matrix = nullptr;
    REQUIRE(ritree_encode(corpus, "bm25", "ri", 16, 4, 7, &matrix) == RITREE_OK);
    CHECK(ritree_matrix_rows(matrix) == 5);
    CHECK(ritree_matrix_dims(matrix) == 16);

    const double* values = nullptr;
    const char* doc_id = nullptr;
    REQUIRE(ritree_matrix_row(matrix, 0, &values, &doc_id) == RITREE_OK);
    CHECK(std::string(doc_id) == "d1");
    double norm_sq = 0.0;
    for (int j = 0; j < 16; ++j) norm_sq += values[j] * values[j];
    CHECK(norm_sq == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ritree_matrix_row(matrix, 99, &values, &doc_id) == RITREE_E_INVALID_ARGUMENT);

    const auto path = fx.dir.file("matrix.tsv");
    REQUIRE(ritree_matrix_save(matrix, path.c_str()) == RITREE_OK);
    ritree_matrix* loaded = nullptr;
    REQUIRE(ritree_matrix_open(path.c_str(), &loaded) == RITREE_OK);
    CHECK(ritree_matrix_rows(loaded) == 5);
    const auto again = fx.dir.file("matrix2.tsv");
    REQUIRE(ritree_matrix_save(loaded, again.c_str()) == RITREE_OK);
    CHECK(read_file(path) == read_file(again));

    CHECK(ritree_encode(corpus, "bm25", "nope", 4, 2, 7, &loaded) == RITREE_E_CONFIG);
    ritree_matrix_close(loaded);
    ritree_matrix_close(matrix);
    ritree_corpus_close(corpus);
}

TEST_CASE("registry handle") {
    TempDir dir;
    ritree_registry* registry = nullptr;
    REQUIRE(ritree_registry_create(64, 6, 11, &registry) == RITREE_OK);

    int64_t entries[8];
    size_t len = 0;
    REQUIRE(ritree_registry_vector(registry, "hello", entries, 8, &len) == RITREE_OK);
    CHECK(len == 6);
    int positives = 0;
    for (size_t i = 0; i < len; ++i) {
        CHECK(entries[i] != 0);
        positives += entries[i] > 0 ? 1 : 0;
    }
    CHECK(positives == 3);
    CHECK(ritree_registry_size(registry) == 1);

    const auto path = dir.file("registry.tsv");
    REQUIRE(ritree_registry_save(registry, path.c_str()) == RITREE_OK);
    ritree_registry* loaded = nullptr;
    REQUIRE(ritree_registry_open(path.c_str(), 64, 6, 11, &loaded) == RITREE_OK);
    int64_t entries2[8];
    size_t len2 = 0;
    REQUIRE(ritree_registry_vector(loaded, "hello", entries2, 8, &len2) == RITREE_OK);
    REQUIRE(len2 == len);
    for (size_t i = 0; i < len; ++i) CHECK(entries[i] == entries2[i]);
    ritree_registry_close(loaded);
    ritree_registry_close(registry);

    CHECK(ritree_registry_create(10, 3, 1, &registry) == RITREE_E_CONFIG);
}

TEST_CASE("ktree handle") {
    TempDir dir;
    ritree_ktree* tree = nullptr;
    REQUIRE(ritree_ktree_create(3, "unmodified", 5, &tree) == RITREE_OK);
    const double points[][2] = {{0, 0}, {0, 1}, {10, 0}, {10, 1}, {5, 5}};
    for (int i = 0; i < 5; ++i) {
        const std::string id = "d" + std::to_string(i);
        REQUIRE(ritree_ktree_insert(tree, points[i], 2, id.c_str()) == RITREE_OK);
    }
    CHECK(ritree_ktree_size(tree) == 5);
    CHECK(ritree_ktree_depth(tree) == 2);
    CHECK(ritree_ktree_dims(tree) == 2);
    CHECK(ritree_ktree_validate(tree) == RITREE_OK);

    size_t level_size = 0;
    REQUIRE(ritree_ktree_level_size(tree, 1, &level_size) == RITREE_OK);
    CHECK(level_size <= 3);
    CHECK(ritree_ktree_level_size(tree, 9, &level_size) == RITREE_E_BAD_LEVEL);

    const auto dump = dir.file("tree.json");
    REQUIRE(ritree_ktree_save(tree, dump.c_str()) == RITREE_OK);
    ritree_ktree* loaded = nullptr;
    REQUIRE(ritree_ktree_open(dump.c_str(), &loaded) == RITREE_OK);
    CHECK(ritree_ktree_size(loaded) == 5);
    CHECK(ritree_ktree_validate(loaded) == RITREE_OK);

    const auto assignments = dir.file("assignments.tsv");
    REQUIRE(ritree_ktree_save_assignments(loaded, assignments.c_str()) == RITREE_OK);
    const auto content = read_file(assignments);
    CHECK(content.find("d0\t") != std::string::npos);

    ritree_ktree_close(loaded);
    ritree_ktree_close(tree);

    // modified variant insists on unit input
    ritree_ktree* unit_tree = nullptr;
    REQUIRE(ritree_ktree_create(3, "modified", 5, &unit_tree) == RITREE_OK);
    const double off_sphere[2] = {3.0, 4.0};
    CHECK(ritree_ktree_insert(unit_tree, off_sphere, 2, "x") == RITREE_E_NOT_UNIT);
    const double on_sphere[2] = {0.6, 0.8};
    CHECK(ritree_ktree_insert(unit_tree, on_sphere, 2, "x") == RITREE_OK);
    ritree_ktree_close(unit_tree);

    CHECK(ritree_ktree_create(1, "unmodified", 5, &tree) == RITREE_E_CONFIG);
    ritree_ktree* bad = nullptr;
    CHECK(ritree_ktree_open(dir.file("absent.json").c_str(), &bad) == RITREE_E_IO);
}

TEST_CASE("evaluate and compare") {
    Fixture fx;
    ritree_corpus* corpus = nullptr;
    REQUIRE(ritree_corpus_open(fx.corpus_path.c_str(), nullptr, fx.labels_path.c_str(),
                               nullptr, &corpus) == RITREE_OK);

    ritree_eval_opts opts = ritree_eval_opts_default();
    CHECK(std::string(opts.repr) == "bm25");
    REQUIRE(ritree_eval_opts_preset('E', &opts) == RITREE_OK);
    CHECK(std::string(opts.variant) == "modified");
    CHECK(std::string(opts.config_id) == "E");
    CHECK(ritree_eval_opts_preset('Z', &opts) == RITREE_E_CONFIG);

    const size_t dims[] = {16};
    opts.dims = dims;
    opts.n_dims = 1;
    opts.seed_len = 4;
    opts.order = 3;
    opts.k = 2;
    opts.runs_tree = 2;
    opts.runs_reduce = 2;
    opts.rng_seed = 9;

    ritree_report* report = nullptr;
    REQUIRE(ritree_evaluate(corpus, &opts, &report) == RITREE_OK);
    REQUIRE(ritree_report_rows(report) == 1);
    const char* config_id = nullptr;
    size_t row_dims = 0, runs = 0;
    double alpha = 0, beta = 0, gamma = 0, delta = 0;
    REQUIRE(ritree_report_row(report, 0, &config_id, &row_dims, &alpha, &beta, &gamma,
                              &delta, &runs) == RITREE_OK);
    CHECK(std::string(config_id) == "E");
    CHECK(row_dims == 16);
    CHECK(runs == 4);
    CHECK(gamma >= 0.0);
    CHECK(gamma <= 1.0);

    const auto tsv = fx.dir.file("report.tsv");
    const auto csv = fx.dir.file("runs.csv");
    REQUIRE(ritree_report_save(report, tsv.c_str(), csv.c_str()) == RITREE_OK);
    CHECK(read_file(tsv).find("config\tdims") == 0);

    const auto cmp = fx.dir.file("cmp.tsv");
    REQUIRE(ritree_compare(csv.c_str(), csv.c_str(), cmp.c_str()) == RITREE_OK);
    CHECK(read_file(cmp).find("\tno\n") != std::string::npos);

    ritree_report_close(report);

    // missing labels surface as such
    ritree_corpus* unlabeled = nullptr;
    REQUIRE(ritree_corpus_open(fx.corpus_path.c_str(), nullptr, nullptr, nullptr,
                               &unlabeled) == RITREE_OK);
    ritree_report* broken = nullptr;
    CHECK(ritree_evaluate(unlabeled, &opts, &broken) == RITREE_E_MISSING_LABEL);
    ritree_corpus_close(unlabeled);
    ritree_corpus_close(corpus);
}

TEST_CASE("metric primitives") {
    const double a[] = {1, 2, 3, 4, 5};
    const double b[] = {2, 3, 4, 5, 6};
    double t = 0, p = 0;
    REQUIRE(ritree_welch_t_test(a, 5, b, 5, &t, &p) == RITREE_OK);
    CHECK(t == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(p == doctest::Approx(0.3466).epsilon(1e-3));
    CHECK(ritree_welch_t_test(a, 1, b, 5, &t, &p) == RITREE_E_DEGENERATE_SAMPLE);

    const uint64_t counts[] = {2, 1, 0, 2};  // {A,A,B}, {B,B}
    double purity = 0, entropy = 0;
    REQUIRE(ritree_micro_purity(counts, 2, 2, &purity) == RITREE_OK);
    REQUIRE(ritree_micro_entropy(counts, 2, 2, &entropy) == RITREE_OK);
    CHECK(purity == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(entropy == doctest::Approx(0.5510).epsilon(1e-4));

    const uint64_t empty[] = {0, 0};
    CHECK(ritree_micro_purity(empty, 1, 2, &purity) == RITREE_E_EMPTY_TABLE);
}
