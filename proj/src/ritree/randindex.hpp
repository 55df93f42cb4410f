#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ritree/vecspace.hpp"

namespace ritree {

struct RiConfig {
    std::uint32_t r = 1000;      // reduced dimensionality
    std::uint32_t seed_len = 10; // non-zeros per index vector, must be even
    std::uint64_t rng_seed = 1;
};

// Term -> sparse ternary index vector, created on first encounter. Each
// vector has exactly seed_len non-zeros, half +1 and half -1, on distinct
// dimensions. A term's vector is derived from hash(rng_seed, term), so
// encoding does not depend on document arrival order and two registries
// with the same seed agree on every term. Concurrent get_or_create is
// safe; racing writers compute the identical vector.
class IndexVectorRegistry {
public:
    explicit IndexVectorRegistry(RiConfig config);

    const RiConfig& config() const { return config_; }
    std::size_t size() const;

    // Returned references stay valid for the registry's lifetime.
    const SparseVector& get_or_create(std::string_view term);
    bool contains(std::string_view term) const;

    // Draws the next vector from the registry's own sequential stream;
    // used where a fresh anonymous vector is wanted rather than a term's.
    SparseVector generate_index_vector();

    // Keys in first-encounter order.
    std::vector<std::string> keys() const;

    // term<TAB>±dim ±dim ...  (sign carries the ternary value)
    void save(std::ostream& out) const;
    void save_file(const std::string& path) const;
    static IndexVectorRegistry load(std::istream& in, RiConfig config);
    static IndexVectorRegistry load_file(const std::string& path, RiConfig config);

private:
    RiConfig config_;
    std::unique_ptr<std::mutex> mutex_;
    std::unordered_map<std::string, SparseVector> map_;
    std::vector<std::string> order_;
    std::mt19937_64 stream_;
};

// unit_normalize(sum over entries of value * index_vector(key(dim))).
// dim_keys maps each original-space dimension to its registry key.
// Throws ZeroVector when the weighted sum cancels exactly.
DenseVector encode_document(IndexVectorRegistry& registry, const SparseVector& row,
                            std::span<const std::string> dim_keys);

// Row-major n x r matrix of encoded documents, rows unit-norm.
std::vector<DenseVector> encode_corpus(IndexVectorRegistry& registry,
                                       std::span<const SparseVector> rows,
                                       std::span<const std::string> dim_keys,
                                       std::span<const std::string> doc_ids);

}  // namespace ritree
