#include "ritree/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace ritree {

namespace {

std::size_t nearest_centroid(const DenseVector& p, std::span<const DenseVector> centroids,
                             double* dist_out) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        const double d = squared_euclidean(p, centroids[c]);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    if (dist_out) *dist_out = best_d;
    return best;
}

void check_preconditions(std::span<const DenseVector> points,
                         std::span<const double> weights, std::size_t k) {
    if (points.empty()) fail(Errc::too_few_points, "k-means over no points");
    if (k < 1 || k > points.size())
        fail(Errc::too_few_points, "k=" + std::to_string(k) + " for " +
                                       std::to_string(points.size()) + " points");
    if (weights.size() != points.size())
        fail(Errc::dimension_mismatch, "k-means: weights/points length mismatch");
}

// Indices of the first occurrence of each distinct point value.
std::vector<std::size_t> distinct_indices(std::span<const DenseVector> points) {
    std::map<DenseVector, std::size_t> seen;
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < points.size(); ++i)
        if (seen.emplace(points[i], i).second) out.push_back(i);
    return out;
}

double weighted_objective(std::span<const DenseVector> points,
                          std::span<const double> weights,
                          std::span<const DenseVector> centroids,
                          std::span<const std::uint32_t> assignment, bool spherical) {
    double obj = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const DenseVector& c = centroids[assignment[i]];
        if (spherical)
            obj += weights[i] * (1.0 - dot(points[i], c));
        else
            obj += weights[i] * squared_euclidean(points[i], c);
    }
    return obj;
}

}  // namespace

bool Partition::has_empty_cluster() const {
    std::vector<bool> used(centroids.size(), false);
    for (auto a : assignment) used[a] = true;
    return std::find(used.begin(), used.end(), false) != used.end();
}

std::vector<DenseVector> seed_perturbation(std::span<const DenseVector> points,
                                           std::span<const double> weights) {
    if (points.size() < 2) fail(Errc::too_few_points, "perturbation seeding needs >= 2 points");
    const DenseVector mu = weighted_mean(points, weights);
    const std::size_t d = mu.size();

    double total_w = std::accumulate(weights.begin(), weights.end(), 0.0);
    std::vector<double> var(d, 0.0);
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = 0; j < d; ++j) {
            const double diff = points[i][j] - mu[j];
            var[j] += weights[i] * diff * diff;
        }
    double mean_std = 0.0;
    std::size_t axis = 0;
    for (std::size_t j = 0; j < d; ++j) {
        var[j] /= total_w;
        mean_std += std::sqrt(var[j]);
        if (var[j] > var[axis]) axis = j;
    }
    mean_std /= static_cast<double>(d);

    double mu_scale = 0.0;
    for (double x : mu) mu_scale = std::max(mu_scale, std::abs(x));
    const double eps = std::max(1e-3 * mean_std, 1e-9 * (1.0 + mu_scale));

    DenseVector lo = mu, hi = mu;
    lo[axis] -= eps;
    hi[axis] += eps;
    return {std::move(lo), std::move(hi)};
}

std::vector<DenseVector> seed_uniform(std::span<const DenseVector> points, std::size_t k,
                                      std::mt19937_64& rng) {
    auto distinct = distinct_indices(points);
    if (k > distinct.size())
        fail(Errc::too_few_points, "uniform seeding: k=" + std::to_string(k) + " but only " +
                                       std::to_string(distinct.size()) + " distinct points");
    // Partial Fisher-Yates over the distinct values.
    for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> dist(i, distinct.size() - 1);
        std::swap(distinct[i], distinct[dist(rng)]);
    }
    std::vector<DenseVector> seeds;
    seeds.reserve(k);
    for (std::size_t i = 0; i < k; ++i) seeds.push_back(points[distinct[i]]);
    return seeds;
}

std::vector<DenseVector> seed_kmeanspp(std::span<const DenseVector> points,
                                       std::span<const double> weights, std::size_t k,
                                       std::mt19937_64& rng) {
    check_preconditions(points, weights, k);
    if (k > distinct_indices(points).size())
        fail(Errc::too_few_points, "k-means++: fewer distinct points than k");

    std::vector<DenseVector> seeds;
    seeds.reserve(k);
    std::uniform_int_distribution<std::size_t> first(0, points.size() - 1);
    seeds.push_back(points[first(rng)]);

    std::vector<double> min_d2(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        min_d2[i] = squared_euclidean(points[i], seeds[0]);

    while (seeds.size() < k) {
        // Inverse-CDF draw over weight * D^2; a point at D^2 = 0 carries
        // no mass and can never be re-sampled.
        double total = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) total += weights[i] * min_d2[i];
        if (total <= 0.0)
            fail(Errc::too_few_points, "k-means++: no remaining probability mass");
        std::uniform_real_distribution<double> u(0.0, total);
        double target = u(rng);
        std::size_t pick = points.size() - 1;
        double acc = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            acc += weights[i] * min_d2[i];
            if (target < acc) {
                pick = i;
                break;
            }
        }
        seeds.push_back(points[pick]);
        for (std::size_t i = 0; i < points.size(); ++i)
            min_d2[i] = std::min(min_d2[i], squared_euclidean(points[i], seeds.back()));
    }
    return seeds;
}

Partition lloyd_from(std::span<const DenseVector> points, std::span<const double> weights,
                     const KMeansConfig& config, std::vector<DenseVector> centroids) {
    check_preconditions(points, weights, config.k);
    if (centroids.size() != config.k)
        fail(Errc::config, "lloyd: got " + std::to_string(centroids.size()) +
                               " initial centroids for k=" + std::to_string(config.k));
    const std::size_t n = points.size();
    const std::size_t k = centroids.size();
    const std::size_t d = points.front().size();
    const std::size_t budget =
        config.policy == Policy::restart_after_6 ? 6 : config.max_iterations;

    Partition part;
    part.assignment.assign(n, 0);
    std::vector<std::uint32_t> prev(n, UINT32_MAX);
    std::vector<double> assign_d2(n, 0.0);

    for (std::size_t iter = 1; iter <= budget; ++iter) {
        part.iterations = iter;
        for (std::size_t i = 0; i < n; ++i)
            part.assignment[i] =
                static_cast<std::uint32_t>(nearest_centroid(points[i], centroids,
                                                            &assign_d2[i]));
        const bool changed = part.assignment != prev;

        std::vector<DenseVector> sums(k, DenseVector(d, 0.0));
        std::vector<double> mass(k, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = part.assignment[i];
            mass[c] += weights[i];
            for (std::size_t j = 0; j < d; ++j) sums[c][j] += weights[i] * points[i][j];
        }

        bool repaired = false;
        for (std::size_t c = 0; c < k; ++c) {
            if (mass[c] > 0.0) {
                for (std::size_t j = 0; j < d; ++j) sums[c][j] /= mass[c];
                if (config.normalize_centroids) {
                    // A zero mean of unit vectors is a measure-zero
                    // degeneracy; keep the previous direction.
                    if (norm(sums[c]) > 0.0)
                        unit_normalize_inplace(sums[c]);
                    else
                        sums[c] = centroids[c];
                }
                centroids[c] = std::move(sums[c]);
            } else {
                std::size_t far = 0;
                for (std::size_t i = 1; i < n; ++i)
                    if (assign_d2[i] > assign_d2[far]) far = i;
                if (centroids[c] != points[far]) {
                    centroids[c] = points[far];
                    repaired = true;
                }
            }
        }

        part.objective_trace.push_back(weighted_objective(points, weights, centroids,
                                                          part.assignment,
                                                          config.normalize_centroids));
        if (!changed && !repaired) {
            part.converged = true;
            break;
        }
        prev = part.assignment;
    }

    part.centroids = std::move(centroids);
    part.sse = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        part.sse += weights[i] * squared_euclidean(points[i], part.centroids[part.assignment[i]]);
    return part;
}

Partition lloyd(std::span<const DenseVector> points, std::span<const double> weights,
                const KMeansConfig& config, std::mt19937_64& rng) {
    check_preconditions(points, weights, config.k);
    std::vector<DenseVector> seeds;
    switch (config.seeding) {
        case Seeding::perturbation:
            if (config.k != 2)
                fail(Errc::config, "perturbation seeding is defined for k = 2");
            seeds = seed_perturbation(points, weights);
            break;
        case Seeding::uniform_random:
            seeds = seed_uniform(points, config.k, rng);
            break;
        case Seeding::kmeanspp:
            seeds = seed_kmeanspp(points, weights, config.k, rng);
            break;
    }
    return lloyd_from(points, weights, config, std::move(seeds));
}

Partition run_with_restarts(std::span<const DenseVector> points,
                            std::span<const double> weights, const KMeansConfig& config,
                            std::mt19937_64& rng) {
    Partition best;
    bool have_best = false;
    const std::size_t attempts = std::max<std::size_t>(1, config.max_restarts);
    for (std::size_t attempt = 0; attempt < attempts; ++attempt) {
        Partition part = lloyd(points, weights, config, rng);
        if (part.converged) return part;
        if (!have_best || part.sse < best.sse) {
            best = std::move(part);
            have_best = true;
        }
    }
    return best;
}

}  // namespace ritree
