#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "ritree/vecspace.hpp"

namespace ritree {

enum class Seeding { perturbation, uniform_random, kmeanspp };
enum class Policy { run_to_convergence, restart_after_6 };

struct KMeansConfig {
    std::size_t k = 2;
    Seeding seeding = Seeding::perturbation;
    Policy policy = Policy::run_to_convergence;
    std::size_t max_restarts = 64;
    bool normalize_centroids = false;
    std::size_t max_iterations = 1000;  // safety valve for run-to-convergence
};

struct Partition {
    std::vector<DenseVector> centroids;
    std::vector<std::uint32_t> assignment;  // point index -> centroid index
    double sse = 0.0;  // sum of weight * squared distance to assigned centroid
    bool converged = false;
    std::size_t iterations = 0;
    // Per-iteration objective: SSE, or sum of weight*(1 - cos) when
    // centroids are normalized.
    std::vector<double> objective_trace;

    bool has_empty_cluster() const;
};

// mu +/- eps*u around the weighted mean; u is the axis of maximal
// variance and eps scales with the mean per-coordinate spread, floored
// so the two seeds stay distinct even for identical points.
std::vector<DenseVector> seed_perturbation(std::span<const DenseVector> points,
                                           std::span<const double> weights);

// k distinct point values, uniform without replacement.
std::vector<DenseVector> seed_uniform(std::span<const DenseVector> points, std::size_t k,
                                      std::mt19937_64& rng);

// Arthur–Vassilvitskii: first seed uniform, then proportional to
// weight * squared distance to the nearest chosen seed.
std::vector<DenseVector> seed_kmeanspp(std::span<const DenseVector> points,
                                       std::span<const double> weights, std::size_t k,
                                       std::mt19937_64& rng);

// Lloyd iterations from explicit initial centroids. Stops when an
// assignment round changes nothing (and no empty-cluster repair fired),
// or at the policy's iteration budget. Empty clusters are repaired by
// reseeding them at the point farthest from its current centroid; if the
// repair is a no-op the cluster is left empty for the caller to see.
Partition lloyd_from(std::span<const DenseVector> points, std::span<const double> weights,
                     const KMeansConfig& config, std::vector<DenseVector> centroids);

// Seeds per config.seeding, then runs lloyd_from.
Partition lloyd(std::span<const DenseVector> points, std::span<const double> weights,
                const KMeansConfig& config, std::mt19937_64& rng);

// Repeats (seed, lloyd) until a run converges or max_restarts is spent;
// on exhaustion returns the lowest-SSE attempt, flagged non-converged.
Partition run_with_restarts(std::span<const DenseVector> points,
                            std::span<const double> weights, const KMeansConfig& config,
                            std::mt19937_64& rng);

}  // namespace ritree
