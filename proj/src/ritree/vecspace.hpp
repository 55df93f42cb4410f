#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ritree/error.hpp"

namespace ritree {

using DenseVector = std::vector<double>;

struct SparseEntry {
    std::uint32_t dim = 0;
    double value = 0.0;
};

// Sorted sparse vector: indices strictly increasing, all < dim, no stored
// zeros. Builders in this library produce that form directly; validate()
// is for data arriving from files.
struct SparseVector {
    std::uint32_t dim = 0;
    std::vector<SparseEntry> entries;

    void validate() const;
};

double dot(const DenseVector& a, const DenseVector& b);
double norm(const DenseVector& v);

double sparse_dot(const SparseVector& a, const SparseVector& b);
double sparse_norm(const SparseVector& v);
DenseVector densify(const SparseVector& v);

// Scales v to unit Euclidean norm. Throws ZeroVector on a zero (or
// non-finite) input, which signals a degenerate document upstream.
DenseVector unit_normalize(const DenseVector& v);
void unit_normalize_inplace(DenseVector& v);

double squared_euclidean(const DenseVector& a, const DenseVector& b);

// acc += weight * sv, in place. Accumulation is always double precision.
void accumulate(DenseVector& acc, const SparseVector& sv, double weight);

DenseVector weighted_mean(std::span<const DenseVector> vectors,
                          std::span<const double> weights);

}  // namespace ritree
