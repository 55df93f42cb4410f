#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <sstream>
#include <string>

#include "ritree/pipeline.hpp"
#include "support.hpp"

using namespace ritree;
using testsupport::TempDir;
using testsupport::read_file;
using testsupport::write_file;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(RITREE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

struct Workspace {
    TempDir dir;
    std::string corpus, labels;

    Workspace() {
        corpus = dir.file("corpus.tsv");
        labels = dir.file("labels.tsv");
        write_file(corpus,
                   "d1\tapple:3 pear:2\n"
                   "d2\tapple:2 plum:2\n"
                   "d3\tpear:2 plum:3 banana:1\n"
                   "d4\tstone:3 iron:2\n"
                   "d5\tstone:2 iron:3\n");
        write_file(labels, "d1\tA\nd2\tA\nd3\tB\nd4\tB\nd5\tB\n");
    }
};

}  // namespace

TEST_CASE("encode writes unit rows and matches the library pipeline") {
    Workspace ws;
    const auto out = ws.dir.file("matrix.tsv");
    REQUIRE(run_cli("encode --corpus " + ws.corpus + " --reduce ri --dims 50" +
                    " --seed-len 4 --rng-seed 7 --out " + out) == 0);

    auto matrix = load_matrix_file(out);
    CHECK(matrix.dims == 50);
    REQUIRE(matrix.rows.size() == 5);
    for (const auto& row : matrix.rows)
        CHECK(testsupport::oracle_norm(row) == doctest::Approx(1.0).epsilon(1e-12));

    // byte-for-byte what the library produces with the same seed
    auto corpus = ingest_corpus_file(ws.corpus);
    EncodeOptions opts;
    opts.reduce = Reduce::ri;
    opts.dims = 50;
    opts.seed_len = 4;
    opts.rng_seed = 7;
    auto expect = encode_pipeline(corpus, opts);
    std::ostringstream expect_bytes;
    save_matrix(expect, expect_bytes);
    CHECK(read_file(out) == expect_bytes.str());
}

TEST_CASE("encode with reduce=none keeps the vocabulary dimensionality") {
    Workspace ws;
    const auto out = ws.dir.file("full.tsv");
    REQUIRE(run_cli("encode --corpus " + ws.corpus + " --reduce none --out " + out) == 0);
    auto matrix = load_matrix_file(out);
    CHECK(matrix.dims == 6);
}

TEST_CASE("invalid flag combinations are usage errors") {
    Workspace ws;
    CHECK(run_cli("encode --corpus " + ws.corpus +
                  " --reduce cull --dims 3 --seed-len 4 --out " +
                  ws.dir.file("x.tsv")) != 0);
    CHECK(run_cli("encode --corpus " + ws.corpus + " --repr nope --out " +
                  ws.dir.file("x.tsv")) != 0);
    CHECK(run_cli("evaluate --corpus " + ws.corpus + " --labels " + ws.labels +
                  " --preset Q --out " + ws.dir.file("r.tsv")) != 0);
    CHECK(run_cli("bogus-subcommand") != 0);
}

TEST_CASE("build produces a valid dump that the library reproduces") {
    Workspace ws;
    const auto matrix_path = ws.dir.file("matrix.tsv");
    REQUIRE(run_cli("encode --corpus " + ws.corpus + " --reduce none --rng-seed 3 --out " +
                    matrix_path) == 0);

    const auto dump = ws.dir.file("tree.json");
    const auto assignments = ws.dir.file("assignments.tsv");
    REQUIRE(run_cli("build --matrix " + matrix_path + " --order 3 --rng-seed 3 --out " +
                    dump + " --assignments " + assignments) == 0);

    auto tree = KTree::load_file(dump);
    CHECK(tree.size() == 5);
    CHECK(tree.depth() == 2);
    KTreeAudit{}.run(tree);

    const auto assignment_text = read_file(assignments);
    CHECK(assignment_text.find("d1\t") != std::string::npos);

    // audit subcommand accepts the dump
    CHECK(run_cli("audit --in " + dump) == 0);

    // identical seed, identical dump
    const auto dump2 = ws.dir.file("tree2.json");
    REQUIRE(run_cli("build --matrix " + matrix_path + " --order 3 --rng-seed 3 --out " +
                    dump2) == 0);
    CHECK(read_file(dump) == read_file(dump2));

    // library-level composition gives the same bytes
    auto matrix = load_matrix_file(matrix_path);
    BuildOptions opts;
    opts.order = 3;
    opts.rng_seed = 3;
    auto expect = build_tree(matrix, opts);
    std::ostringstream expect_bytes;
    expect.save(expect_bytes);
    CHECK(read_file(dump) == expect_bytes.str());

    // corrupted dumps are rejected by audit
    const auto broken = ws.dir.file("broken.json");
    write_file(broken, read_file(dump).substr(0, 50));
    CHECK(run_cli("audit --in " + broken) != 0);
}

TEST_CASE("evaluate reproduces the hand-scored toy corpus") {
    Workspace ws;
    const auto report_path = ws.dir.file("report.tsv");
    const auto runs_path = ws.dir.file("runs.csv");
    REQUIRE(run_cli("evaluate --corpus " + ws.corpus + " --labels " + ws.labels +
                    " --reduce none --order 3 --k 2 --runs-tree 1 --runs-reduce 1" +
                    " --rng-seed 1 --dims 6 --out " + report_path + " --runs-out " +
                    runs_path) == 0);
    const auto report = read_file(report_path);
    CHECK(report.find("\t0.8000\t") != std::string::npos);  // gamma column
    CHECK(report.find("\t0.5510\t") != std::string::npos);  // alpha column

    // compare a report against itself: identical samples short-circuit
    // to p = 1 even when a t-test would be degenerate
    const auto cmp = ws.dir.file("cmp.tsv");
    REQUIRE(run_cli("compare " + runs_path + " " + runs_path + " --out " + cmp) == 0);
    CHECK(read_file(cmp).find("\t1\tno\n") != std::string::npos);

    // two different single-measurement reports are degenerate
    const auto other_runs = ws.dir.file("other.csv");
    write_file(other_runs,
               "config,dims,tree_run,reduce_run,entropy,purity\n"
               "X,6,0,0,0.9,0.9\n");
    CHECK(run_cli("compare " + runs_path + " " + other_runs + " --out " + cmp) != 0);

    const auto report2 = ws.dir.file("report2.tsv");
    const auto runs2 = ws.dir.file("runs2.csv");
    REQUIRE(run_cli("evaluate --corpus " + ws.corpus + " --labels " + ws.labels +
                    " --reduce ri --seed-len 4 --order 3 --k 2 --runs-tree 3" +
                    " --runs-reduce 3 --rng-seed 5 --dims 16 --out " + report2 +
                    " --runs-out " + runs2) == 0);
    REQUIRE(run_cli("compare " + runs2 + " " + runs2 + " --out " + cmp) == 0);
    CHECK(read_file(cmp).find("\tno\n") != std::string::npos);
}

TEST_CASE("preset E expands to modified RI bm25") {
    Workspace ws;
    const auto report_path = ws.dir.file("report.tsv");
    REQUIRE(run_cli("evaluate --corpus " + ws.corpus + " --labels " + ws.labels +
                    " --preset E --dims 16 --seed-len 4 --order 3 --k 2" +
                    " --runs-tree 1 --runs-reduce 1 --rng-seed 2 --out " +
                    report_path) == 0);
    const auto report = read_file(report_path);
    CHECK(report.find("E\t16\t") != std::string::npos);
}

TEST_CASE("whole pipeline is deterministic from one seed") {
    Workspace ws;
    auto run_once = [&](const std::string& tag) {
        const auto matrix = ws.dir.file("m" + tag + ".tsv");
        const auto dump = ws.dir.file("t" + tag + ".json");
        const auto report = ws.dir.file("r" + tag + ".tsv");
        const auto runs = ws.dir.file("runs" + tag + ".csv");
        REQUIRE(run_cli("encode --corpus " + ws.corpus +
                        " --reduce ri --dims 32 --seed-len 4 --rng-seed 99 --out " +
                        matrix) == 0);
        REQUIRE(run_cli("build --matrix " + matrix + " --order 3 --rng-seed 99 --out " +
                        dump) == 0);
        REQUIRE(run_cli("evaluate --corpus " + ws.corpus + " --labels " + ws.labels +
                        " --reduce ri --dims 32 --seed-len 4 --order 3 --k 2" +
                        " --runs-tree 2 --runs-reduce 2 --rng-seed 99 --out " + report +
                        " --runs-out " + runs) == 0);
        return read_file(matrix) + "|" + read_file(dump) + "|" + read_file(report) + "|" +
               read_file(runs);
    };
    CHECK(run_once("1") == run_once("2"));
}

TEST_CASE("rng seed falls back to the environment") {
    Workspace ws;
    const auto via_flag = ws.dir.file("flag.tsv");
    REQUIRE(run_cli("encode --corpus " + ws.corpus +
                    " --reduce ri --dims 16 --seed-len 4 --rng-seed 123 --out " +
                    via_flag) == 0);
    const auto via_env = ws.dir.file("env.tsv");
    const std::string cmd = "RITREE_RNG_SEED=123 " + std::string(RITREE_CLI_PATH) +
                            " encode --corpus " + ws.corpus +
                            " --reduce ri --dims 16 --seed-len 4 --out " + via_env +
                            " >/dev/null 2>&1";
    REQUIRE(std::system(cmd.c_str()) == 0);
    CHECK(read_file(via_flag) == read_file(via_env));
}
