#include "ritree/vecspace.hpp"

#include <cmath>
#include <cstddef>
#include <string>

namespace ritree {

void SparseVector::validate() const {
    std::uint32_t prev = 0;
    bool first = true;
    for (const auto& e : entries) {
        if (!first && e.dim <= prev)
            fail(Errc::format, "sparse vector indices not strictly increasing");
        if (e.dim >= dim)
            fail(Errc::format, "sparse index " + std::to_string(e.dim) +
                                   " out of range for dim " + std::to_string(dim));
        if (e.value == 0.0 || !std::isfinite(e.value))
            fail(Errc::format, "sparse vector holds zero or non-finite value");
        prev = e.dim;
        first = false;
    }
}

double dot(const DenseVector& a, const DenseVector& b) {
    if (a.size() != b.size())
        fail(Errc::dimension_mismatch,
             "dot: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(const DenseVector& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double sparse_dot(const SparseVector& a, const SparseVector& b) {
    double s = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.entries.size() && j < b.entries.size()) {
        if (a.entries[i].dim < b.entries[j].dim) {
            ++i;
        } else if (a.entries[i].dim > b.entries[j].dim) {
            ++j;
        } else {
            s += a.entries[i].value * b.entries[j].value;
            ++i;
            ++j;
        }
    }
    return s;
}

double sparse_norm(const SparseVector& v) {
    double s = 0.0;
    for (const auto& e : v.entries) s += e.value * e.value;
    return std::sqrt(s);
}

DenseVector densify(const SparseVector& v) {
    DenseVector out(v.dim, 0.0);
    for (const auto& e : v.entries) out[e.dim] = e.value;
    return out;
}

DenseVector unit_normalize(const DenseVector& v) {
    DenseVector out = v;
    unit_normalize_inplace(out);
    return out;
}

void unit_normalize_inplace(DenseVector& v) {
    double n = norm(v);
    if (n == 0.0) fail(Errc::zero_vector, "cannot normalize a zero vector");
    if (!std::isfinite(n)) fail(Errc::zero_vector, "cannot normalize a non-finite vector");
    for (double& x : v) x /= n;
}

double squared_euclidean(const DenseVector& a, const DenseVector& b) {
    if (a.size() != b.size())
        fail(Errc::dimension_mismatch, "squared_euclidean: " + std::to_string(a.size()) +
                                           " vs " + std::to_string(b.size()));
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

void accumulate(DenseVector& acc, const SparseVector& sv, double weight) {
    if (sv.dim != acc.size())
        fail(Errc::dimension_mismatch, "accumulate: vector dim " + std::to_string(acc.size()) +
                                           " vs sparse dim " + std::to_string(sv.dim));
    for (const auto& e : sv.entries) acc[e.dim] += weight * e.value;
}

DenseVector weighted_mean(std::span<const DenseVector> vectors,
                          std::span<const double> weights) {
    if (vectors.empty()) fail(Errc::empty_input, "weighted_mean of no vectors");
    if (vectors.size() != weights.size())
        fail(Errc::dimension_mismatch, "weighted_mean: " + std::to_string(vectors.size()) +
                                           " vectors vs " + std::to_string(weights.size()) +
                                           " weights");
    const std::size_t d = vectors.front().size();
    DenseVector out(d, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        if (vectors[i].size() != d)
            fail(Errc::dimension_mismatch, "weighted_mean: ragged input");
        const double w = weights[i];
        for (std::size_t j = 0; j < d; ++j) out[j] += w * vectors[i][j];
        total += w;
    }
    if (total <= 0.0) fail(Errc::empty_input, "weighted_mean: non-positive total weight");
    for (double& x : out) x /= total;
    return out;
}

}  // namespace ritree
