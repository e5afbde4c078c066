#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cmek/model.hpp"
#include "cmek/stats.hpp"

namespace cmek {

enum class PredictorMode {
    cmek,    ///< LOO-fitted non-negative LAD predictor
    oracle,  ///< predictions replaced by true cross-domain errors
};

struct BenchConfig {
    PipelineConfig pipeline;
    std::size_t worst_k = 5;
    std::size_t random_subsets = 20;  ///< random n-subsets per (target, n) on the top-n curve
    std::optional<std::size_t> n_max;  ///< unset: N - 1
    bool topn = true;
    PredictorMode predictor = PredictorMode::cmek;
    double histogram_bin_width = 0.025;
};

struct TopnPoint {
    std::size_t n = 0;
    double cmek_error = 0.0;
    double random_error = 0.0;
    double all_domains_error = 0.0;
};

/// One held-out target of the outer leave-one-out loop.
struct RunResult {
    std::string target_name;
    std::map<std::string, double> per_candidate_true_error;
    std::map<std::string, double> per_candidate_predicted;
    std::vector<std::string> selected;  ///< full predicted ranking, best first
    double selected_error = 0.0;        ///< true error of selected.front()
    double best_error = 0.0;
    double relative_error = 0.0;        ///< selected_error - best_error
    double all_domains_error = 0.0;
    std::optional<PredictorWeights> weights;  ///< unset in oracle mode
    std::vector<TopnPoint> topn;
    std::vector<std::string> flags;
};

/// Uniform random single selection, evaluated exactly.
struct RandomBaseline {
    double avg_error = 0.0;
    double prob_best = 0.0;
    double prob_worstk = 0.0;
};

struct MethodSummary {
    double prob_best = 0.0;
    std::optional<double> prob_worstk;  ///< unset when N - 1 <= worst_k
    double avg_abs_error = 0.0;
    double avg_relative_error = 0.0;
};

struct Comparison {
    std::string name;
    std::optional<TTestResult> result;
    std::string note;  ///< why result is missing
};

struct SelectionReport {
    std::vector<RunResult> runs;
    MethodSummary cmek;
    MethodSummary random;
    MethodSummary optimal;
    std::vector<TopnPoint> topn_curve;  ///< means over runs
    std::vector<Comparison> ttests;
    std::size_t worst_k = 5;
    std::size_t random_subsets = 0;
    std::uint64_t seed = 0;
    double histogram_bin_width = 0.025;
    std::string predictor = "cmek";
};

/// avg = mean error, prob_best = share of candidates tied at the minimum,
/// prob_worstk = share of candidates whose error is at least the k-th largest.
RandomBaseline random_baseline(const std::map<std::string, double>& per_candidate_true_error,
                               std::size_t worst_k = 5);

/// True if `error` is among the k largest of `errors`, ties included.
bool in_worst_k(const std::map<std::string, double>& errors, double error, std::size_t k);

/// Outer leave-one-out: each corpus in turn is the target; the predictor is
/// fit on the remaining N - 1 (which never see the target's labels), used to
/// rank them, and scored against the target's labels.
SelectionReport outer_loo_benchmark(const std::vector<Corpus>& corpora, const BenchConfig& cfg);

/// Mean cross-domain error of training on the union of the CMEK top-n,
/// on random n-subsets, and on all N - 1 candidates, for n = 1..n_max.
std::vector<TopnPoint> topn_curve(const std::vector<Corpus>& corpora, const BenchConfig& cfg,
                                  std::size_t n_max);

/// Writes report.json, table1.csv, fig3.csv and fig4.csv into out_dir.
void emit_report(const SelectionReport& report, const std::filesystem::path& out_dir);

nlohmann::json report_to_json(const SelectionReport& report);

}  // namespace cmek
