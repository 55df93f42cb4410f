#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "ritree/vecspace.hpp"

namespace ritree {

enum class Variant { unmodified, modified };

Variant variant_from_string(const std::string& name);
const char* variant_name(Variant v);

struct KTreeConfig {
    std::size_t order = 50;  // m: max entries per node
    Variant variant = Variant::unmodified;
    std::uint64_t rng_seed = 1;
};

struct KTreeNode;

// Internal entries carry (centroid, subtree weight, child); leaf entries
// carry (data vector, weight 1, doc id).
struct KTreeEntry {
    DenseVector vector;
    std::uint64_t weight = 1;
    std::unique_ptr<KTreeNode> child;  // null for leaf entries
    std::string doc_id;                // leaf entries only
};

struct KTreeNode {
    bool leaf = true;
    std::vector<KTreeEntry> entries;
};

struct LevelEntry {
    DenseVector vector;
    std::uint64_t weight = 0;
    std::size_t subtree_id = 0;  // left-to-right ordinal at that level
};

// Height-balanced nearest-neighbour cluster tree. Vectors are inserted
// via nearest-centroid descent; full nodes split with k=2 k-means and
// promote their two centroids, growing the tree from the root. Every
// internal centroid stays the (weighted) mean of the data beneath it;
// the modified variant keeps all centroids on the unit sphere and uses
// randomized, restarted k-means for splits.
class KTree {
public:
    explicit KTree(KTreeConfig config);

    const KTreeConfig& config() const { return config_; }
    std::size_t depth() const { return depth_; }
    std::uint64_t size() const { return n_inserted_; }
    std::size_t dim() const { return dim_; }
    bool empty() const { return n_inserted_ == 0; }
    const KTreeNode* root() const { return root_.get(); }

    void insert(const DenseVector& v, const std::string& doc_id);

    // Entries of all nodes at a 1-based level (1 = root, depth = leaves,
    // whose entries are the data vectors), left to right.
    std::vector<LevelEntry> level(std::size_t depth_index) const;

    // Above-leaf centroids: the finest-granularity clusters. A depth-1
    // tree degenerates to a single cluster holding every document.
    std::vector<LevelEntry> codebook() const;

    // doc_id -> codebook ordinal, in left-to-right leaf order.
    std::vector<std::pair<std::string, std::size_t>> assignments() const;

    void save(std::ostream& out) const;
    void save_file(const std::string& path) const;
    static KTree load(std::istream& in);
    static KTree load_file(const std::string& path);

private:
    KTreeNode* descend_and_update(const DenseVector& v,
                                  std::vector<std::pair<KTreeNode*, std::size_t>>& path);
    void split_overflow(KTreeNode* node,
                        std::vector<std::pair<KTreeNode*, std::size_t>>& path);
    std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_entries(
        const KTreeNode& node);

    KTreeConfig config_;
    std::unique_ptr<KTreeNode> root_;
    std::size_t depth_ = 1;
    std::uint64_t n_inserted_ = 0;
    std::size_t dim_ = 0;
    std::mt19937_64 split_rng_;
};

// Lowest entry index minimizing squared Euclidean distance to v.
std::size_t nearest_entry(const KTreeNode& node, const DenseVector& v);

// mu' = (w_old * mu + v) / (w_old + 1), given the already-incremented
// weight. The modified variant re-normalizes afterwards.
void update_entry(KTreeEntry& entry, const DenseVector& v, Variant variant);

// Full structural check: equal leaf depth, 1..m occupancy, weight
// conservation, and the variant's centroid invariant (means recomputed
// bottom-up from the leaves, or unit norms). Throws on violation.
struct KTreeAudit {
    double mean_tolerance = 1e-6;   // relative, unmodified variant
    double unit_tolerance = 1e-9;   // modified variant
    void run(const KTree& tree) const;
};

}  // namespace ritree
