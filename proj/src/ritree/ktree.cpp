#include "ritree/ktree.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "ritree/kmeans.hpp"
#include "ritree/rng.hpp"

namespace ritree {

using nlohmann::json;

Variant variant_from_string(const std::string& name) {
    if (name == "unmodified") return Variant::unmodified;
    if (name == "modified") return Variant::modified;
    fail(Errc::config, "unknown variant '" + name + "'");
}

const char* variant_name(Variant v) {
    return v == Variant::unmodified ? "unmodified" : "modified";
}

KTree::KTree(KTreeConfig config)
    : config_(config),
      root_(std::make_unique<KTreeNode>()),
      split_rng_(rng::engine(rng::derive(config.rng_seed, "ktree-splits"))) {
    if (config_.order < 2) fail(Errc::config, "tree order must be >= 2");
}

std::size_t nearest_entry(const KTreeNode& node, const DenseVector& v) {
    if (node.entries.empty()) fail(Errc::empty_node, "nearest_entry on an empty node");
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < node.entries.size(); ++i) {
        const double d = squared_euclidean(node.entries[i].vector, v);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

void update_entry(KTreeEntry& entry, const DenseVector& v, Variant variant) {
    entry.weight += 1;
    const double w_new = static_cast<double>(entry.weight);
    for (std::size_t j = 0; j < entry.vector.size(); ++j)
        entry.vector[j] += (v[j] - entry.vector[j]) / w_new;
    if (variant == Variant::modified) unit_normalize_inplace(entry.vector);
}

KTreeNode* KTree::descend_and_update(const DenseVector& v,
                                     std::vector<std::pair<KTreeNode*, std::size_t>>& path) {
    KTreeNode* node = root_.get();
    while (!node->leaf) {
        const std::size_t idx = nearest_entry(*node, v);
        update_entry(node->entries[idx], v, config_.variant);
        path.push_back({node, idx});
        node = node->entries[idx].child.get();
    }
    return node;
}

void KTree::insert(const DenseVector& v, const std::string& doc_id) {
    const double n = norm(v);
    if (!std::isfinite(n)) fail(Errc::format, "insert of a non-finite vector");
    if (n_inserted_ == 0) {
        dim_ = v.size();
    } else if (v.size() != dim_) {
        fail(Errc::dimension_mismatch, "insert: vector dim " + std::to_string(v.size()) +
                                           " vs tree dim " + std::to_string(dim_));
    }
    if (config_.variant == Variant::modified && std::abs(n - 1.0) > 1e-6)
        fail(Errc::not_unit, "modified variant requires unit-norm input, got norm " +
                                 std::to_string(n) + " for doc '" + doc_id + "'");

    std::vector<std::pair<KTreeNode*, std::size_t>> path;
    KTreeNode* leaf = descend_and_update(v, path);
    KTreeEntry entry;
    entry.vector = v;
    entry.weight = 1;
    entry.doc_id = doc_id;
    leaf->entries.push_back(std::move(entry));
    ++n_inserted_;

    KTreeNode* cur = leaf;
    while (cur && cur->entries.size() > config_.order) {
        split_overflow(cur, path);
        cur = path.empty() ? nullptr : path.back().first;
        if (!path.empty()) path.pop_back();
    }
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> KTree::split_entries(
    const KTreeNode& node) {
    std::vector<DenseVector> points;
    std::vector<double> weights;
    points.reserve(node.entries.size());
    weights.reserve(node.entries.size());
    for (const auto& e : node.entries) {
        points.push_back(e.vector);
        weights.push_back(static_cast<double>(e.weight));
    }

    bool degenerate = false;
    Partition part;
    KMeansConfig cfg;
    cfg.k = 2;
    if (config_.variant == Variant::unmodified) {
        cfg.seeding = Seeding::perturbation;
        cfg.policy = Policy::run_to_convergence;
        part = lloyd(points, weights, cfg, split_rng_);
    } else {
        cfg.seeding = Seeding::uniform_random;
        cfg.policy = Policy::restart_after_6;
        cfg.normalize_centroids = true;
        try {
            part = run_with_restarts(points, weights, cfg, split_rng_);
        } catch (const Error& e) {
            // Fewer than two distinct values: nothing for k-means to separate.
            if (e.code() != Errc::too_few_points) throw;
            degenerate = true;
        }
    }

    std::vector<std::size_t> left, right;
    if (!degenerate) {
        for (std::size_t i = 0; i < node.entries.size(); ++i)
            (part.assignment[i] == 0 ? left : right).push_back(i);
        degenerate = left.empty() || right.empty();
    }
    if (degenerate) {
        // Pathological duplicates: fall back to a balanced split by parity.
        left.clear();
        right.clear();
        for (std::size_t i = 0; i < node.entries.size(); ++i)
            (i % 2 == 0 ? left : right).push_back(i);
    }
    return {std::move(left), std::move(right)};
}

namespace {

// Promoted centroid for one side of a split: the exact weighted mean of
// the side's entries. Ancestors keep their centroids; the data below the
// parent has not changed.
KTreeEntry promote(std::unique_ptr<KTreeNode> side, Variant variant) {
    DenseVector acc(side->entries.front().vector.size(), 0.0);
    std::uint64_t total = 0;
    for (const auto& e : side->entries) {
        total += e.weight;
        const double w = static_cast<double>(e.weight);
        for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += w * e.vector[j];
    }
    for (double& x : acc) x /= static_cast<double>(total);
    if (variant == Variant::modified) {
        if (norm(acc) > 0.0)
            unit_normalize_inplace(acc);
        else
            acc = side->entries.front().vector;
    }
    KTreeEntry entry;
    entry.vector = std::move(acc);
    entry.weight = total;
    entry.child = std::move(side);
    return entry;
}

}  // namespace

void KTree::split_overflow(KTreeNode* node,
                           std::vector<std::pair<KTreeNode*, std::size_t>>& path) {
    auto [left_idx, right_idx] = split_entries(*node);

    auto left = std::make_unique<KTreeNode>();
    auto right = std::make_unique<KTreeNode>();
    left->leaf = right->leaf = node->leaf;
    left->entries.reserve(left_idx.size());
    right->entries.reserve(right_idx.size());
    for (auto i : left_idx) left->entries.push_back(std::move(node->entries[i]));
    for (auto i : right_idx) right->entries.push_back(std::move(node->entries[i]));

    KTreeEntry promoted_left = promote(std::move(left), config_.variant);
    KTreeEntry promoted_right = promote(std::move(right), config_.variant);

    if (path.empty()) {
        auto new_root = std::make_unique<KTreeNode>();
        new_root->leaf = false;
        new_root->entries.push_back(std::move(promoted_left));
        new_root->entries.push_back(std::move(promoted_right));
        root_ = std::move(new_root);
        ++depth_;
    } else {
        auto [parent, idx] = path.back();
        parent->entries[idx] = std::move(promoted_left);
        parent->entries.insert(parent->entries.begin() + static_cast<std::ptrdiff_t>(idx) + 1,
                               std::move(promoted_right));
    }
}

std::vector<LevelEntry> KTree::level(std::size_t depth_index) const {
    if (empty()) fail(Errc::bad_level, "level of an empty tree");
    if (depth_index < 1 || depth_index > depth_)
        fail(Errc::bad_level, "level " + std::to_string(depth_index) + " of a depth-" +
                                  std::to_string(depth_) + " tree");
    std::vector<const KTreeNode*> nodes{root_.get()};
    for (std::size_t lvl = 1; lvl < depth_index; ++lvl) {
        std::vector<const KTreeNode*> next;
        for (const auto* n : nodes)
            for (const auto& e : n->entries) next.push_back(e.child.get());
        nodes = std::move(next);
    }
    std::vector<LevelEntry> out;
    std::size_t ordinal = 0;
    for (const auto* n : nodes)
        for (const auto& e : n->entries) out.push_back({e.vector, e.weight, ordinal++});
    return out;
}

std::vector<LevelEntry> KTree::codebook() const {
    if (empty()) fail(Errc::bad_level, "codebook of an empty tree");
    if (depth_ >= 2) return level(depth_ - 1);
    // Degenerate single-node tree: one cluster holding every document.
    DenseVector acc(dim_, 0.0);
    for (const auto& e : root_->entries)
        for (std::size_t j = 0; j < dim_; ++j) acc[j] += e.vector[j];
    for (double& x : acc) x /= static_cast<double>(n_inserted_);
    if (config_.variant == Variant::modified && norm(acc) > 0.0)
        unit_normalize_inplace(acc);
    return {LevelEntry{std::move(acc), n_inserted_, 0}};
}

std::vector<std::pair<std::string, std::size_t>> KTree::assignments() const {
    if (empty()) fail(Errc::empty_node, "assignments of an empty tree");
    std::vector<std::pair<std::string, std::size_t>> out;
    out.reserve(n_inserted_);
    if (depth_ == 1) {
        for (const auto& e : root_->entries) out.emplace_back(e.doc_id, 0);
        return out;
    }
    std::vector<const KTreeNode*> nodes{root_.get()};
    for (std::size_t lvl = 1; lvl < depth_ - 1; ++lvl) {
        std::vector<const KTreeNode*> next;
        for (const auto* n : nodes)
            for (const auto& e : n->entries) next.push_back(e.child.get());
        nodes = std::move(next);
    }
    std::size_t ordinal = 0;
    for (const auto* n : nodes)
        for (const auto& e : n->entries) {
            for (const auto& leaf_entry : e.child->entries)
                out.emplace_back(leaf_entry.doc_id, ordinal);
            ++ordinal;
        }
    return out;
}

namespace {

json node_to_json(const KTreeNode& node) {
    json entries = json::array();
    for (const auto& e : node.entries) {
        if (node.leaf)
            entries.push_back(json::array({e.weight, e.vector, e.doc_id, false}));
        else
            entries.push_back(json::array({e.weight, e.vector, node_to_json(*e.child)}));
    }
    return json::array({node.leaf ? "leaf" : "internal", entries});
}

std::unique_ptr<KTreeNode> node_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_string() || !j[1].is_array())
        fail(Errc::format, "tree dump: node must be [kind, entries]");
    auto node = std::make_unique<KTreeNode>();
    const std::string kind = j[0].get<std::string>();
    if (kind == "leaf")
        node->leaf = true;
    else if (kind == "internal")
        node->leaf = false;
    else
        fail(Errc::format, "tree dump: unknown node kind '" + kind + "'");
    for (const auto& je : j[1]) {
        if (!je.is_array() || je.size() < 3)
            fail(Errc::format, "tree dump: malformed entry");
        KTreeEntry e;
        e.weight = je[0].get<std::uint64_t>();
        e.vector = je[1].get<DenseVector>();
        for (double x : e.vector)
            if (!std::isfinite(x)) fail(Errc::format, "tree dump: non-finite coordinate");
        if (node->leaf) {
            if (je.size() != 4) fail(Errc::format, "tree dump: leaf entry needs 4 fields");
            e.doc_id = je[2].get<std::string>();
            if (je[3].get<bool>())
                fail(Errc::format, "tree dump: tombstoned entries are not supported");
        } else {
            e.child = node_from_json(je[2]);
        }
        node->entries.push_back(std::move(e));
    }
    return node;
}

struct RebuildStats {
    std::size_t leaf_depth = 0;
    std::uint64_t leaf_count = 0;
};

RebuildStats rebuild_stats(const KTreeNode& node, std::size_t depth) {
    if (node.leaf) return {depth, node.entries.size()};
    RebuildStats out{0, 0};
    for (const auto& e : node.entries) {
        RebuildStats s = rebuild_stats(*e.child, depth + 1);
        if (out.leaf_depth == 0) out.leaf_depth = s.leaf_depth;
        if (s.leaf_depth != out.leaf_depth)
            fail(Errc::format, "tree dump: leaves at unequal depth");
        out.leaf_count += s.leaf_count;
    }
    return out;
}

}  // namespace

void KTree::save(std::ostream& out) const {
    json j;
    j["format"] = "ktree";
    j["version"] = 1;
    j["config"] = {{"order", config_.order},
                   {"variant", variant_name(config_.variant)},
                   {"rng_seed", config_.rng_seed}};
    j["dim"] = dim_;
    j["depth"] = depth_;
    j["n_inserted"] = n_inserted_;
    std::ostringstream state;
    state << split_rng_;
    j["rng_state"] = state.str();
    j["root"] = empty() ? json() : node_to_json(*root_);
    out << j.dump() << '\n';
}

void KTree::save_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) fail(Errc::io, "cannot write " + path);
    save(out);
}

KTree KTree::load(std::istream& in) {
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        fail(Errc::format, "tree dump: invalid JSON at byte " + std::to_string(e.byte));
    }
    try {
        if (j.value("format", "") != "ktree" || j.value("version", 0) != 1)
            fail(Errc::format, "tree dump: not a ktree v1 dump");
        KTreeConfig config;
        config.order = j.at("config").at("order").get<std::size_t>();
        config.variant = variant_from_string(j.at("config").at("variant").get<std::string>());
        config.rng_seed = j.at("config").at("rng_seed").get<std::uint64_t>();
        KTree tree(config);
        tree.dim_ = j.at("dim").get<std::size_t>();
        if (!j.at("root").is_null()) {
            tree.root_ = node_from_json(j.at("root"));
            RebuildStats stats = rebuild_stats(*tree.root_, 1);
            tree.depth_ = stats.leaf_depth;
            tree.n_inserted_ = stats.leaf_count;
        }
        if (tree.depth_ != j.at("depth").get<std::size_t>() ||
            tree.n_inserted_ != j.at("n_inserted").get<std::uint64_t>())
            fail(Errc::format, "tree dump: header does not match tree body");
        std::istringstream state(j.at("rng_state").get<std::string>());
        state >> tree.split_rng_;
        if (!state) fail(Errc::format, "tree dump: bad rng state");
        return tree;
    } catch (const json::exception& e) {
        fail(Errc::format, std::string("tree dump: ") + e.what());
    }
}

KTree KTree::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::io, "cannot open " + path);
    return load(in);
}

namespace {

struct AuditResult {
    DenseVector weighted_sum;  // over leaf data vectors
    std::uint64_t weight = 0;
};

AuditResult audit_node(const KTreeNode& node, std::size_t depth, const KTree& tree,
                       const KTreeAudit& opts) {
    const auto m = tree.config().order;
    if (node.entries.empty()) fail(Errc::internal, "audit: empty node in a non-empty tree");
    if (node.entries.size() > m)
        fail(Errc::internal, "audit: node holds " + std::to_string(node.entries.size()) +
                                 " > m = " + std::to_string(m));
    AuditResult out;
    out.weighted_sum.assign(tree.dim(), 0.0);
    for (const auto& e : node.entries) {
        if (e.vector.size() != tree.dim()) fail(Errc::internal, "audit: ragged vector");
        if (node.leaf) {
            if (depth != tree.depth()) fail(Errc::internal, "audit: leaf at wrong depth");
            if (e.weight != 1) fail(Errc::internal, "audit: leaf entry weight != 1");
            if (e.child) fail(Errc::internal, "audit: leaf entry with a child");
            for (std::size_t j = 0; j < tree.dim(); ++j) out.weighted_sum[j] += e.vector[j];
            out.weight += 1;
            continue;
        }
        if (!e.child) fail(Errc::internal, "audit: internal entry without child");
        AuditResult sub = audit_node(*e.child, depth + 1, tree, opts);
        if (sub.weight != e.weight)
            fail(Errc::internal, "audit: entry weight " + std::to_string(e.weight) +
                                     " != subtree leaf count " + std::to_string(sub.weight));
        if (tree.config().variant == Variant::unmodified) {
            DenseVector mean = sub.weighted_sum;
            for (double& x : mean) x /= static_cast<double>(sub.weight);
            double err = 0.0, scale = 0.0;
            for (std::size_t j = 0; j < mean.size(); ++j) {
                const double diff = e.vector[j] - mean[j];
                err += diff * diff;
                scale += mean[j] * mean[j];
            }
            if (std::sqrt(err) > opts.mean_tolerance * std::max(1.0, std::sqrt(scale)))
                fail(Errc::internal, "audit: centroid drifted from subtree mean");
        } else {
            if (std::abs(norm(e.vector) - 1.0) > opts.unit_tolerance)
                fail(Errc::internal, "audit: centroid norm off the unit sphere");
        }
        for (std::size_t j = 0; j < tree.dim(); ++j)
            out.weighted_sum[j] += sub.weighted_sum[j];
        out.weight += sub.weight;
    }
    return out;
}

}  // namespace

void KTreeAudit::run(const KTree& tree) const {
    if (tree.empty()) {
        if (!tree.root() || !tree.root()->leaf || !tree.root()->entries.empty() ||
            tree.depth() != 1)
            fail(Errc::internal, "audit: malformed empty tree");
        return;
    }
    AuditResult r = audit_node(*tree.root(), 1, tree, *this);
    if (r.weight != tree.size())
        fail(Errc::internal, "audit: leaf count " + std::to_string(r.weight) +
                                 " != n_inserted " + std::to_string(tree.size()));
}

}  // namespace ritree
