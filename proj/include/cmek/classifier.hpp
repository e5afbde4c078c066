#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "cmek/corpus.hpp"
#include "cmek/features.hpp"

namespace cmek {

struct TrainConfig {
    double alpha = 1.0;  ///< L2 strength on the weights; the bias is unregularized
    std::size_t max_iterations = 1000;
    double tolerance = 1e-6;  ///< stop once the gradient's L2 norm is at or below this
    std::uint64_t seed = 0;   ///< fold shuffling for inner_error
    std::size_t min_count = kDefaultMinCount;
    double max_df_fraction = kDefaultMaxDfFraction;

    void validate() const;
};

/// Linear decision rule over a tf-idf feature space fit on the training corpus.
struct Hypothesis {
    Vocabulary vocab;
    std::vector<double> idf;
    std::vector<double> weights;
    double bias = 0.0;
    bool converged = false;
    std::size_t iterations = 0;
    double gradient_norm = 0.0;
};

/// Deduplicated training design: each distinct row carries how many
/// documents with label 1 and label 0 share it.
struct LogisticProblem {
    std::size_t dim = 0;
    std::vector<SparseRow> rows;
    std::vector<double> positives;
    std::vector<double> negatives;
};

struct LogisticFit {
    std::vector<double> weights;
    double bias = 0.0;
    double objective = 0.0;
    double gradient_norm = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<double> objective_trace;  ///< filled when tracing is requested
};

/// Minimizes sum_r [pos_r * ln(1 + e^-m_r) + neg_r * ln(1 + e^m_r)] + alpha/2 |w|^2
/// with m_r = x_r . w + b, by line-searched Newton-CG from w = 0, b = 0.
LogisticFit fit_logistic(const LogisticProblem& problem, double alpha, std::size_t max_iterations,
                         double tolerance, bool trace_objective = false);

/// Objective value of the problem above at (weights, bias).
double logistic_objective(const LogisticProblem& problem, double alpha,
                          std::span<const double> weights, double bias);

/// Fits vocabulary, idf and the regularized logistic loss on `corpus`.
/// Identical token sequences are merged first, which makes the result
/// independent of document order.
Hypothesis train(const Corpus& corpus, const TrainConfig& cfg);

double decision_value(const Hypothesis& h, const Document& doc);

/// 1 iff w . x + b > 0 for the document's tf-idf row under h.vocab.
int classify(const Hypothesis& h, const Document& doc);

enum class ErrorKind { inner_cv, cross_domain, holdout };

struct ErrorEstimate {
    double error = 0.0;
    std::size_t n_evaluated = 0;
    std::size_t n_misclassified = 0;
    ErrorKind kind = ErrorKind::holdout;
};

/// 0/1 error of h on a fully labeled corpus.
ErrorEstimate holdout_error(const Hypothesis& h, const Corpus& corpus);

/// Stratified k-fold cross-validation error; each fold refits vocabulary,
/// idf and weights on its training part only.
ErrorEstimate inner_error(const Corpus& corpus, const TrainConfig& cfg, std::size_t folds = 10);

/// Train on all of `source`, score on all of `target` (which must be labeled).
ErrorEstimate cross_error(const Corpus& source, const Corpus& target, const TrainConfig& cfg);

nlohmann::json hypothesis_to_json(const Hypothesis& h);
Hypothesis hypothesis_from_json(const nlohmann::json& j);

}  // namespace cmek
