#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <random>
#include <set>
#include <sstream>

#include "ritree/ktree.hpp"
#include "support.hpp"

using namespace ritree;
using testsupport::random_vector;

namespace {

KTree build_random_tree(std::size_t n, std::size_t order, std::size_t d, Variant variant,
                        std::uint64_t seed) {
    KTree tree({order, variant, seed});
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        auto v = random_vector(rng, d);
        if (variant == Variant::modified) unit_normalize_inplace(v);
        tree.insert(v, "doc" + std::to_string(i));
    }
    return tree;
}

}  // namespace

TEST_CASE("first m inserts stay in a root leaf") {
    KTree tree({3, Variant::unmodified, 1});
    CHECK(tree.empty());
    CHECK(tree.depth() == 1);
    for (int i = 0; i < 3; ++i)
        tree.insert({double(i), 0.0}, "d" + std::to_string(i));
    CHECK(tree.depth() == 1);
    CHECK(tree.size() == 3);
    REQUIRE(tree.root() != nullptr);
    CHECK(tree.root()->leaf);
    CHECK(tree.root()->entries.size() == 3);
}

TEST_CASE("the m+1 insert splits the root") {
    KTree tree({3, Variant::unmodified, 1});
    tree.insert({0.0, 0.0}, "d0");
    tree.insert({0.0, 1.0}, "d1");
    tree.insert({10.0, 0.0}, "d2");
    tree.insert({10.0, 1.0}, "d3");
    CHECK(tree.depth() == 2);
    REQUIRE_FALSE(tree.root()->leaf);
    REQUIRE(tree.root()->entries.size() == 2);
    for (const auto& e : tree.root()->entries) {
        REQUIRE(e.child != nullptr);
        CHECK(e.child->leaf);
        CHECK(e.weight == e.child->entries.size());
    }
    KTreeAudit{}.run(tree);

    // well-separated pairs end up in the same leaves
    std::map<std::string, std::size_t> cluster;
    for (const auto& [doc, c] : tree.assignments()) cluster[doc] = c;
    CHECK(cluster["d0"] == cluster["d1"]);
    CHECK(cluster["d2"] == cluster["d3"]);
    CHECK(cluster["d0"] != cluster["d2"]);
}

TEST_CASE("update_entry applies the incremental mean rule") {
    SUBCASE("mean of one point updated with itself") {
        KTreeEntry entry;
        entry.vector = {2.0, -1.0};
        entry.weight = 1;
        update_entry(entry, {2.0, -1.0}, Variant::unmodified);
        CHECK(entry.vector == DenseVector{2.0, -1.0});
        CHECK(entry.weight == 2);
    }
    SUBCASE("hand case") {
        KTreeEntry entry;
        entry.vector = {0.0, 0.0};
        entry.weight = 1;
        update_entry(entry, {2.0, 0.0}, Variant::unmodified);
        CHECK(entry.vector == DenseVector{1.0, 0.0});
        CHECK(entry.weight == 2);
    }
    SUBCASE("modified variant re-normalizes") {
        KTreeEntry entry;
        entry.vector = {1.0, 0.0};
        entry.weight = 1;
        update_entry(entry, {0.0, 1.0}, Variant::modified);
        CHECK(norm(entry.vector) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(entry.vector[0] == doctest::Approx(entry.vector[1]));
    }
}

TEST_CASE("nearest_entry") {
    KTreeNode node;
    node.leaf = true;
    SUBCASE("empty node") { CHECK_THROWS_AS(nearest_entry(node, {1.0}), Error); }

    KTreeEntry a, b, c;
    a.vector = {0.0, 0.0};
    b.vector = {4.0, 0.0};
    c.vector = {0.0, 4.0};
    node.entries.push_back(std::move(a));
    SUBCASE("single entry") { CHECK(nearest_entry(node, {9.0, 9.0}) == 0); }

    node.entries.push_back(std::move(b));
    node.entries.push_back(std::move(c));
    SUBCASE("equidistant tie goes to the lowest index") {
        CHECK(nearest_entry(node, {2.0, 2.0}) == 0);  // ties with both b and c
        CHECK(nearest_entry(node, {2.0, 0.0}) == 0);  // exact tie a vs b
    }
    SUBCASE("matches a linear-scan oracle") {
        std::mt19937_64 rng(3);
        for (int trial = 0; trial < 100; ++trial) {
            auto v = random_vector(rng, 2, 3.0);
            std::size_t best = node.entries.size() - 1;
            double best_d = squared_euclidean(node.entries.back().vector, v);
            for (std::size_t i = node.entries.size() - 1; i-- > 0;) {
                const double d = squared_euclidean(node.entries[i].vector, v);
                if (d <= best_d) {  // reverse scan: <= keeps the lowest index
                    best_d = d;
                    best = i;
                }
            }
            CHECK(nearest_entry(node, v) == best);
        }
    }
}

TEST_CASE("identical vectors fall back to a balanced parity split") {
    KTree tree({3, Variant::unmodified, 7});
    for (int i = 0; i < 4; ++i) tree.insert({5.0, 5.0}, "d" + std::to_string(i));
    CHECK(tree.depth() == 2);
    REQUIRE(tree.root()->entries.size() == 2);
    CHECK(tree.root()->entries[0].child->entries.size() == 2);
    CHECK(tree.root()->entries[1].child->entries.size() == 2);
    KTreeAudit{}.run(tree);

    // modified variant hits the same fallback via too-few distinct points
    KTree unit_tree({3, Variant::modified, 7});
    for (int i = 0; i < 4; ++i) unit_tree.insert({1.0, 0.0}, "d" + std::to_string(i));
    CHECK(unit_tree.depth() == 2);
    CHECK(unit_tree.root()->entries[0].child->entries.size() == 2);
    KTreeAudit{}.run(unit_tree);
}

TEST_CASE("structural invariants hold over random insertion sequences") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::size_t> n_dist(1, 200);
    KTreeAudit audit;
    for (int sequence = 0; sequence < 120; ++sequence) {
        const std::size_t n = n_dist(rng);
        const std::size_t order = sequence % 2 == 0 ? 3 : 11;
        const auto variant = sequence % 4 < 2 ? Variant::unmodified : Variant::modified;
        auto tree = build_random_tree(n, order, 2, variant, rng());
        CHECK(tree.size() == n);
        CHECK_NOTHROW(audit.run(tree));
    }
}

TEST_CASE("unmodified centroids are exact subtree means") {
    // KTreeAudit recomputes every subtree mean bottom-up from the leaves.
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto tree = build_random_tree(400, 5, 8, Variant::unmodified, seed);
        CHECK_NOTHROW(KTreeAudit{}.run(tree));
    }
}

TEST_CASE("modified centroids stay on the unit sphere") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto tree = build_random_tree(400, 5, 8, Variant::modified, seed);
        CHECK_NOTHROW(KTreeAudit{}.run(tree));
    }
}

TEST_CASE("deep trees keep all leaves at equal depth") {
    auto tree = build_random_tree(30, 3, 2, Variant::unmodified, 23);
    CHECK(tree.depth() >= 3);
    KTreeAudit{}.run(tree);
}

TEST_CASE("insert validation") {
    KTree tree({3, Variant::unmodified, 1});
    tree.insert({1.0, 2.0}, "a");
    CHECK_THROWS_AS(tree.insert({1.0, 2.0, 3.0}, "b"), Error);

    KTree unit_tree({3, Variant::modified, 1});
    try {
        unit_tree.insert({3.0, 4.0}, "a");
        FAIL("expected NotUnit");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::not_unit);
    }
    CHECK_NOTHROW(unit_tree.insert({0.6, 0.8}, "a"));
}

TEST_CASE("level extraction") {
    SUBCASE("depth-1 tree: level 1 is the data") {
        KTree tree({5, Variant::unmodified, 1});
        tree.insert({1.0}, "a");
        tree.insert({2.0}, "b");
        auto entries = tree.level(1);
        REQUIRE(entries.size() == 2);
        CHECK(entries[0].vector == DenseVector{1.0});
        CHECK(entries[0].weight == 1);
        CHECK(entries[1].subtree_id == 1);
        CHECK_THROWS_AS(tree.level(2), Error);
        CHECK_THROWS_AS(tree.level(0), Error);
    }
    SUBCASE("weights at every level sum to n_inserted") {
        auto tree = build_random_tree(500, 11, 2, Variant::unmodified, 31);
        for (std::size_t lvl = 1; lvl <= tree.depth(); ++lvl) {
            std::uint64_t total = 0;
            for (const auto& e : tree.level(lvl)) total += e.weight;
            CHECK(total == tree.size());
        }
    }
    SUBCASE("level sizes: root holds at most m, counts grow downward") {
        auto tree = build_random_tree(1000, 11, 2, Variant::unmodified, 37);
        CHECK(tree.level(1).size() <= 11);
        std::size_t prev = 0;
        for (std::size_t lvl = 1; lvl <= tree.depth(); ++lvl) {
            const auto size = tree.level(lvl).size();
            CHECK(size >= prev);
            prev = size;
        }
        CHECK(tree.level(tree.depth()).size() == 1000);
    }
    SUBCASE("empty tree has no levels") {
        KTree tree({3, Variant::unmodified, 1});
        CHECK_THROWS_AS(tree.level(1), Error);
    }
}

TEST_CASE("assignments") {
    SUBCASE("single leaf maps every doc to cluster 0") {
        KTree tree({5, Variant::unmodified, 1});
        tree.insert({1.0}, "a");
        tree.insert({2.0}, "b");
        for (const auto& [doc, cluster] : tree.assignments()) CHECK(cluster == 0);
        CHECK(tree.codebook().size() == 1);
        CHECK(tree.codebook()[0].weight == 2);
    }
    SUBCASE("assignments partition the documents and match the leaves") {
        auto tree = build_random_tree(300, 4, 3, Variant::unmodified, 41);
        auto pairs = tree.assignments();
        CHECK(pairs.size() == 300);
        std::set<std::string> seen;
        for (const auto& [doc, cluster] : pairs) CHECK(seen.insert(doc).second);

        const auto codebook = tree.codebook();
        CHECK(codebook.size() == tree.level(tree.depth() - 1).size());

        // membership audit: cluster sizes equal codebook weights
        std::map<std::size_t, std::uint64_t> sizes;
        for (const auto& [doc, cluster] : pairs) sizes[cluster] += 1;
        for (const auto& e : codebook) CHECK(sizes[e.subtree_id] == e.weight);
    }
}

TEST_CASE("serialize round trip") {
    SUBCASE("empty tree") {
        KTree tree({4, Variant::modified, 9});
        std::ostringstream out;
        tree.save(out);
        std::istringstream in(out.str());
        auto loaded = KTree::load(in);
        CHECK(loaded.empty());
        CHECK(loaded.depth() == 1);
        CHECK(loaded.config().order == 4);
        CHECK(loaded.config().variant == Variant::modified);
        CHECK(loaded.config().rng_seed == 9);
    }
    SUBCASE("bit-exact vectors, weights, structure") {
        auto tree = build_random_tree(1000, 7, 4, Variant::unmodified, 51);
        std::ostringstream out;
        tree.save(out);
        std::istringstream in(out.str());
        auto loaded = KTree::load(in);
        CHECK(loaded.size() == tree.size());
        CHECK(loaded.depth() == tree.depth());
        std::ostringstream again;
        loaded.save(again);
        CHECK(again.str() == out.str());
        KTreeAudit{}.run(loaded);

        // a reloaded tree continues deterministically: same further
        // inserts give identical dumps
        std::mt19937_64 extra_rng(99);
        KTree reloaded = [&] {
            std::istringstream stream(out.str());
            return KTree::load(stream);
        }();
        for (int i = 0; i < 50; ++i) {
            auto v = random_vector(extra_rng, 4);
            tree.insert(v, "extra" + std::to_string(i));
            reloaded.insert(v, "extra" + std::to_string(i));
        }
        std::ostringstream d1, d2;
        tree.save(d1);
        reloaded.save(d2);
        CHECK(d1.str() == d2.str());
    }
    SUBCASE("corrupted stream reports a format error") {
        std::istringstream garbage("{\"format\": \"ktree\", \"version\": 1,");
        try {
            KTree::load(garbage);
            FAIL("expected FormatError");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::format);
            CHECK(std::string(e.what()).find("byte") != std::string::npos);
        }
        std::istringstream wrong("{\"format\": \"other\"}");
        CHECK_THROWS_AS(KTree::load(wrong), Error);
    }
}

TEST_CASE("same seed and sequence give identical trees") {
    auto a = build_random_tree(200, 5, 3, Variant::modified, 77);
    auto b = build_random_tree(200, 5, 3, Variant::modified, 77);
    std::ostringstream da, db;
    a.save(da);
    b.save(db);
    CHECK(da.str() == db.str());
}
