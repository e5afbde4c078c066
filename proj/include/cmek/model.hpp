#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cmek/classifier.hpp"
#include "cmek/corpus.hpp"
#include "cmek/distances.hpp"

namespace cmek {

inline constexpr std::size_t kFeatureCount = 6;
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureOrder{
    "chi2", "mmd", "emd", "kld", "inner_error", "const"};

/// Everything needed to turn a (source, target) pair into a feature vector.
struct PipelineConfig {
    DistanceConfig distance;
    TrainConfig train;
    std::size_t top_k = 1000;
    std::size_t fold_count = 10;
    std::uint64_t seed = 20190101;
    std::size_t threads = 1;

    /// Seed for the (source, target) pair's subsampling streams.
    std::uint64_t pair_seed(std::string_view source, std::string_view target) const;
    /// Training config whose fold seed is derived from the corpus name.
    TrainConfig train_for(std::string_view corpus) const;
};

/// [chi2, mmd, emd, kld, inner_error, 1] for one ordered pair.
struct DistanceFeatureVector {
    std::array<double, kFeatureCount> values{};
    std::string source_name;
    std::string target_name;
    std::set<std::string> flags;
};

struct TrainingPair {
    DistanceFeatureVector features;
    double true_error = 0.0;
};

struct PredictorWeights {
    std::array<double, kFeatureCount> beta{};
    double objective = 0.0;  ///< sum of absolute residuals on the training pairs
    std::size_t n_pairs = 0;
    double dual_bound = 0.0;
    bool non_unique = false;  ///< another optimal coefficient vector may exist
    bool standardized = false;
    /// Features are divided by these before the dot product; all 1 unless standardized.
    std::array<double, kFeatureCount> column_scale{1, 1, 1, 1, 1, 1};
};

struct FitOptions {
    /// Divide each distance/error column by its standard deviation (no
    /// centering) before fitting. Changes the meaning of beta.
    bool standardize = false;
};

/// Feature vector from precomputed parts.
DistanceFeatureVector make_features(const DistanceVector& d, double source_inner_error,
                                    std::string source_name, std::string target_name);

/// Distances source -> target plus the source's cross-validated error. Only
/// the target's documents are read, never its labels.
DistanceFeatureVector assemble_features(const Corpus& source, const Corpus& target,
                                        const PipelineConfig& cfg);

/// Ordered pairs (source, proxy target) over all candidates, N(N-1) of them,
/// in row-major candidate order. Proxy targets are labeled candidates.
std::vector<TrainingPair> build_loo_training_set(const std::vector<Corpus>& candidates,
                                                 const PipelineConfig& cfg);

/// Global minimizer of sum_i |xi_i - beta . s_i| subject to beta >= 0.
PredictorWeights fit_weights(const std::vector<TrainingPair>& pairs, const FitOptions& options = {});

/// beta . s (after the column scaling recorded in the weights).
double predict(const PredictorWeights& weights, const DistanceFeatureVector& features);
double predict(const PredictorWeights& weights, const std::array<double, kFeatureCount>& values);

struct RankedCandidate {
    std::string name;
    double predicted_error = 0.0;
};

/// Sorts ascending by predicted error, ties by name, and keeps the first n.
std::vector<RankedCandidate> rank_candidates(std::vector<RankedCandidate> scored, std::size_t n);

/// Scores every candidate against the target and returns the best n.
std::vector<RankedCandidate> select(const PredictorWeights& weights, const std::vector<Corpus>& candidates,
                                    const Corpus& target, std::size_t n, const PipelineConfig& cfg);

/// Concatenation in the given order with ids renumbered; members' names joined by '+'.
Corpus union_corpus(const std::vector<const Corpus*>& corpora);
Corpus union_corpus(const std::vector<Corpus>& corpora);

nlohmann::json weights_to_json(const PredictorWeights& w);
PredictorWeights weights_from_json(const nlohmann::json& j);

}  // namespace cmek
