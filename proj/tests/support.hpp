#pragma once

// Shared test helpers: random data and independent oracles.

#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "ritree/vecspace.hpp"
#include "support_files.hpp"

namespace testsupport {

inline ritree::DenseVector random_vector(std::mt19937_64& rng, std::size_t d,
                                         double scale = 1.0) {
    std::normal_distribution<double> dist(0.0, scale);
    ritree::DenseVector v(d);
    for (auto& x : v) x = dist(rng);
    return v;
}

// Norm recomputed with a different accumulation order and precision.
inline double oracle_norm(const ritree::DenseVector& v) {
    long double s = 0.0L;
    for (auto it = v.rbegin(); it != v.rend(); ++it) s += static_cast<long double>(*it) * *it;
    return static_cast<double>(std::sqrt(s));
}

inline double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

// Exhaustive minimal-SSE 2-partition of a small point set (weighted).
// Returns {sse, assignment}; both sides non-empty.
struct BruteForce2 {
    double sse = 0.0;
    std::vector<std::uint32_t> assignment;
    std::vector<ritree::DenseVector> centroids;
};

inline BruteForce2 brute_force_2partition(const std::vector<ritree::DenseVector>& points,
                                          const std::vector<double>& weights) {
    const std::size_t n = points.size();
    const std::size_t d = points.front().size();
    BruteForce2 best;
    best.sse = std::numeric_limits<double>::infinity();
    for (std::size_t mask = 1; mask + 1 < (1u << n); ++mask) {
        ritree::DenseVector c0(d, 0.0), c1(d, 0.0);
        double w0 = 0, w1 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const bool side = (mask >> i) & 1;
            auto& c = side ? c1 : c0;
            (side ? w1 : w0) += weights[i];
            for (std::size_t j = 0; j < d; ++j) c[j] += weights[i] * points[i][j];
        }
        for (std::size_t j = 0; j < d; ++j) {
            c0[j] /= w0;
            c1[j] /= w1;
        }
        double sse = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& c = ((mask >> i) & 1) ? c1 : c0;
            sse += weights[i] * ritree::squared_euclidean(points[i], c);
        }
        if (sse < best.sse) {
            best.sse = sse;
            best.assignment.assign(n, 0);
            for (std::size_t i = 0; i < n; ++i)
                best.assignment[i] = static_cast<std::uint32_t>((mask >> i) & 1);
            best.centroids = {c0, c1};
        }
    }
    return best;
}

}  // namespace testsupport
