#include "cmek/model.hpp"

#include <algorithm>
#include <cmath>

#include "cmek/error.hpp"
#include "cmek/parallel.hpp"
#include "cmek/rng.hpp"
#include "cmek/simplex.hpp"

namespace cmek {

std::uint64_t PipelineConfig::pair_seed(std::string_view source, std::string_view target) const {
    return derive_seed(seed, "pair", source, target);
}

TrainConfig PipelineConfig::train_for(std::string_view corpus) const {
    TrainConfig t = train;
    t.seed = derive_seed(seed, "folds", corpus);
    return t;
}

DistanceFeatureVector make_features(const DistanceVector& d, double source_inner_error,
                                    std::string source_name, std::string target_name) {
    DistanceFeatureVector f;
    f.values = {d.chi2, d.mmd, d.emd, d.kld, source_inner_error, 1.0};
    f.source_name = std::move(source_name);
    f.target_name = std::move(target_name);
    f.flags = d.degenerate_flags;
    for (std::size_t i = 0; i + 1 < kFeatureCount; ++i) {
        if (!std::isfinite(f.values[i]) || f.values[i] < 0.0) {
            throw Error("non-finite or negative feature for " + f.source_name + " -> " + f.target_name);
        }
    }
    return f;
}

DistanceFeatureVector assemble_features(const Corpus& source, const Corpus& target,
                                        const PipelineConfig& cfg) {
    const auto d = distance_vector(source, target, cfg.distance, cfg.top_k,
                                   cfg.pair_seed(source.name, target.name));
    const auto inner = inner_error(source, cfg.train_for(source.name), cfg.fold_count);
    return make_features(d, inner.error, source.name, target.name);
}

std::vector<TrainingPair> build_loo_training_set(const std::vector<Corpus>& candidates,
                                                 const PipelineConfig& cfg) {
    const std::size_t n = candidates.size();
    if (n < 3) throw Error("insufficient candidates for LOO fit: need at least 3, got " + std::to_string(n));
    for (const auto& c : candidates) {
        if (!c.fully_labeled()) throw Error("LOO fit requires labeled candidate " + c.name);
    }

    std::vector<double> inner(n);
    parallel_for(n, cfg.threads, [&](std::size_t i) {
        inner[i] = inner_error(candidates[i], cfg.train_for(candidates[i].name), cfg.fold_count).error;
    });

    std::vector<std::pair<std::size_t, std::size_t>> order;
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t t = 0; t < n; ++t) {
            if (s != t) order.emplace_back(s, t);
        }
    }

    std::vector<TrainingPair> pairs(order.size());
    parallel_for(order.size(), cfg.threads, [&](std::size_t k) {
        const auto& source = candidates[order[k].first];
        const auto& proxy = candidates[order[k].second];
        const auto d = distance_vector(source, strip_labels(proxy), cfg.distance, cfg.top_k,
                                       cfg.pair_seed(source.name, proxy.name));
        pairs[k].features = make_features(d, inner[order[k].first], source.name, proxy.name);
        pairs[k].true_error = cross_error(source, proxy, cfg.train_for(source.name)).error;
    });
    return pairs;
}

PredictorWeights fit_weights(const std::vector<TrainingPair>& pairs, const FitOptions& options) {
    if (pairs.empty()) throw Error("fit_weights needs at least one training pair");

    PredictorWeights w;
    w.n_pairs = pairs.size();
    w.standardized = options.standardize;
    if (options.standardize) {
        for (std::size_t j = 0; j + 1 < kFeatureCount; ++j) {
            double sq = 0.0, mean = 0.0;
            for (const auto& p : pairs) mean += p.features.values[j];
            mean /= static_cast<double>(pairs.size());
            for (const auto& p : pairs) sq += (p.features.values[j] - mean) * (p.features.values[j] - mean);
            const double sd = std::sqrt(sq / static_cast<double>(pairs.size()));
            w.column_scale[j] = sd > 0.0 ? sd : 1.0;
        }
    }

    std::vector<std::vector<double>> design;
    std::vector<double> targets;
    design.reserve(pairs.size());
    for (const auto& p : pairs) {
        std::vector<double> row(kFeatureCount);
        for (std::size_t j = 0; j < kFeatureCount; ++j) row[j] = p.features.values[j] / w.column_scale[j];
        design.push_back(std::move(row));
        targets.push_back(p.true_error);
    }

    const auto sol = solve_nonnegative_lad(design, targets);
    std::copy(sol.coefficients.begin(), sol.coefficients.end(), w.beta.begin());
    w.objective = sol.objective;
    w.dual_bound = sol.dual_bound;
    w.non_unique = sol.alternative_optima;
    return w;
}

double predict(const PredictorWeights& weights, const std::array<double, kFeatureCount>& values) {
    double s = 0.0;
    for (std::size_t j = 0; j < kFeatureCount; ++j) s += weights.beta[j] * (values[j] / weights.column_scale[j]);
    return s;
}

double predict(const PredictorWeights& weights, const DistanceFeatureVector& features) {
    return predict(weights, features.values);
}

std::vector<RankedCandidate> rank_candidates(std::vector<RankedCandidate> scored, std::size_t n) {
    if (n < 1 || n > scored.size()) {
        throw Error("selection size " + std::to_string(n) + " out of range 1.." + std::to_string(scored.size()));
    }
    std::sort(scored.begin(), scored.end(), [](const RankedCandidate& a, const RankedCandidate& b) {
        return a.predicted_error != b.predicted_error ? a.predicted_error < b.predicted_error : a.name < b.name;
    });
    scored.resize(n);
    return scored;
}

std::vector<RankedCandidate> select(const PredictorWeights& weights, const std::vector<Corpus>& candidates,
                                    const Corpus& target, std::size_t n, const PipelineConfig& cfg) {
    if (n < 1 || n > candidates.size()) {
        throw Error("selection size " + std::to_string(n) + " out of range 1.." +
                    std::to_string(candidates.size()));
    }
    const Corpus unlabeled = strip_labels(target);
    std::vector<RankedCandidate> scored(candidates.size());
    parallel_for(candidates.size(), cfg.threads, [&](std::size_t i) {
        scored[i] = {candidates[i].name, predict(weights, assemble_features(candidates[i], unlabeled, cfg))};
    });
    return rank_candidates(std::move(scored), n);
}

Corpus union_corpus(const std::vector<const Corpus*>& corpora) {
    if (corpora.empty()) throw Error("union_corpus needs at least one corpus");
    Corpus out;
    for (std::size_t i = 0; i < corpora.size(); ++i) {
        if (i) {
            out.name += '+';
            out.provenance += ';';
        }
        out.name += corpora[i]->name;
        out.provenance += corpora[i]->provenance;
        for (const auto& d : corpora[i]->documents) {
            out.documents.push_back(d);
            out.documents.back().id = out.documents.size() - 1;
        }
    }
    return out;
}

Corpus union_corpus(const std::vector<Corpus>& corpora) {
    std::vector<const Corpus*> ptrs;
    for (const auto& c : corpora) ptrs.push_back(&c);
    return union_corpus(ptrs);
}

nlohmann::json weights_to_json(const PredictorWeights& w) {
    nlohmann::json j;
    j["beta"] = w.beta;
    j["objective"] = w.objective;
    j["n_pairs"] = w.n_pairs;
    j["feature_order"] = std::vector<std::string>(kFeatureOrder.begin(), kFeatureOrder.end());
    j["dual_bound"] = w.dual_bound;
    j["non_unique"] = w.non_unique;
    j["standardized"] = w.standardized;
    if (w.standardized) j["column_scale"] = w.column_scale;
    return j;
}

PredictorWeights weights_from_json(const nlohmann::json& j) {
    PredictorWeights w;
    try {
        const auto beta = j.at("beta").get<std::vector<double>>();
        if (beta.size() != kFeatureCount) throw Error("weights JSON: beta must have 6 entries");
        std::copy(beta.begin(), beta.end(), w.beta.begin());
        w.objective = j.value("objective", 0.0);
        w.n_pairs = j.value("n_pairs", std::size_t{0});
        w.dual_bound = j.value("dual_bound", 0.0);
        w.non_unique = j.value("non_unique", false);
        w.standardized = j.value("standardized", false);
        if (j.contains("column_scale")) {
            const auto s = j["column_scale"].get<std::vector<double>>();
            if (s.size() != kFeatureCount) throw Error("weights JSON: column_scale must have 6 entries");
            std::copy(s.begin(), s.end(), w.column_scale.begin());
        }
        if (j.contains("feature_order")) {
            const auto order = j["feature_order"].get<std::vector<std::string>>();
            if (!std::equal(order.begin(), order.end(), kFeatureOrder.begin(), kFeatureOrder.end())) {
                throw Error("weights JSON: unexpected feature order");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed weights JSON: ") + e.what());
    }
    for (double b : w.beta) {
        if (!(b >= 0.0)) throw Error("weights JSON: coefficients must be non-negative");
    }
    return w;
}

}  // namespace cmek
