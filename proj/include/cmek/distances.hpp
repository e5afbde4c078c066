#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "cmek/corpus.hpp"
#include "cmek/features.hpp"

namespace cmek {

/// Dense row-major cost matrix for transport between histogram bins.
struct GroundMatrix {
    std::size_t dim = 0;
    std::vector<double> cost;

    double operator()(std::size_t i, std::size_t j) const noexcept { return cost[i * dim + j]; }

    /// Throws unless square, non-negative, symmetric with a zero diagonal.
    void validate() const;

    /// 0 on the diagonal, 1 elsewhere.
    static GroundMatrix binary(std::size_t dim);
};

struct DistanceConfig {
    double chi2_lambda = 0.05;
    double kld_lambda = 1e-5;
    std::optional<double> mmd_sigma;  ///< unset: median heuristic
    std::size_t mmd_max_samples = 5000;
    std::optional<GroundMatrix> ground_matrix;  ///< unset: binary metric

    void validate() const;
};

struct DistanceVector {
    double chi2 = 0.0;
    double mmd = 0.0;
    double emd = 0.0;
    double kld = 0.0;
    std::set<std::string> degenerate_flags;
};

/// (mass + lambda) / (1 + K * lambda) entrywise.
FeatureDistribution smooth(const FeatureDistribution& p, double lambda);

/// Sum_i (p'_i - q'_i)^2 / q'_i over distributions smoothed with chi2_lambda.
double chi2_divergence(const FeatureDistribution& p, const FeatureDistribution& q,
                       const DistanceConfig& cfg);

/// Sum_i p'_i ln(p'_i / q'_i) over distributions smoothed with kld_lambda.
double kl_divergence(const FeatureDistribution& p, const FeatureDistribution& q,
                     const DistanceConfig& cfg);

struct MmdResult {
    double value = 0.0;
    double sigma = 0.0;
    std::size_t samples_per_side = 0;
    bool degenerate = false;  ///< bandwidth collapsed to zero
};

/// Biased (V-statistic) MMD under the Gaussian RBF kernel
/// exp(-|x - y|^2 / (2 sigma^2)), after capping both samples at
/// cfg.mmd_max_samples and subsampling the larger to the smaller size.
MmdResult mmd(const DocVectorMatrix& samples_a, const DocVectorMatrix& samples_b,
              const DistanceConfig& cfg, std::uint64_t seed);

/// Optimal transport cost between two histograms on a common support.
/// The binary metric is evaluated in closed form as 0.5 * |p - q|_1.
double emd(const FeatureDistribution& p, const FeatureDistribution& q, const DistanceConfig& cfg);

/// Min-cost transport value for arbitrary non-negative costs. `supply` and
/// `demand` must be non-negative with equal totals (up to rounding).
double transport_cost(std::span<const double> supply, std::span<const double> demand,
                      const GroundMatrix& ground);

/// chi2, kld and emd on length-matched top-k histograms plus mmd on tf-idf
/// rows restricted to the same support, all measured source -> target.
/// Reads no labels.
DistanceVector distance_vector(const Corpus& source, const Corpus& target, const DistanceConfig& cfg,
                               std::size_t k, std::uint64_t seed);

}  // namespace cmek
