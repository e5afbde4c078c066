#include "cmek/bench.hpp"

#include <algorithm>
#include <set>

#include "cmek/error.hpp"
#include "cmek/parallel.hpp"
#include "cmek/rng.hpp"

namespace cmek {

RandomBaseline random_baseline(const std::map<std::string, double>& errors, std::size_t worst_k) {
    if (errors.empty()) throw Error("random_baseline needs at least one candidate");
    RandomBaseline r;
    double best = errors.begin()->second;
    for (const auto& [name, e] : errors) {
        r.avg_error += e;
        best = std::min(best, e);
    }
    const double n = static_cast<double>(errors.size());
    r.avg_error /= n;
    std::size_t n_best = 0, n_worst = 0;
    for (const auto& [name, e] : errors) {
        if (e == best) ++n_best;
        if (in_worst_k(errors, e, worst_k)) ++n_worst;
    }
    r.prob_best = static_cast<double>(n_best) / n;
    r.prob_worstk = static_cast<double>(n_worst) / n;
    return r;
}

bool in_worst_k(const std::map<std::string, double>& errors, double error, std::size_t k) {
    if (k == 0) return false;
    if (errors.size() <= k) return true;
    std::vector<double> sorted;
    sorted.reserve(errors.size());
    for (const auto& [name, e] : errors) sorted.push_back(e);
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    return error >= sorted[k - 1];
}

namespace {

/// Every pairwise quantity the protocol needs. A pair's features and
/// errors do not depend on which corpus is held out, so they are computed
/// once and shared by all runs.
struct Panel {
    std::size_t n = 0;
    std::vector<double> inner;
    std::vector<DistanceFeatureVector> features;  ///< n x n, diagonal unused
    std::vector<double> cross;                    ///< n x n, diagonal unused

    const DistanceFeatureVector& feature(std::size_t s, std::size_t t) const { return features[s * n + t]; }
    double error(std::size_t s, std::size_t t) const { return cross[s * n + t]; }
};

Panel build_panel(const std::vector<Corpus>& corpora, const PipelineConfig& cfg, bool need_features) {
    Panel p;
    p.n = corpora.size();
    p.inner.assign(p.n, 0.0);
    p.features.resize(p.n * p.n);
    p.cross.assign(p.n * p.n, 0.0);

    if (need_features) {
        parallel_for(p.n, cfg.threads, [&](std::size_t i) {
            p.inner[i] = inner_error(corpora[i], cfg.train_for(corpora[i].name), cfg.fold_count).error;
        });
    }

    std::vector<std::pair<std::size_t, std::size_t>> order;
    for (std::size_t s = 0; s < p.n; ++s) {
        for (std::size_t t = 0; t < p.n; ++t) {
            if (s != t) order.emplace_back(s, t);
        }
    }
    parallel_for(order.size(), cfg.threads, [&](std::size_t k) {
        const auto [s, t] = order[k];
        const auto& source = corpora[s];
        const auto& target = corpora[t];
        if (need_features) {
            const auto d = distance_vector(source, strip_labels(target), cfg.distance, cfg.top_k,
                                           cfg.pair_seed(source.name, target.name));
            p.features[s * p.n + t] = make_features(d, p.inner[s], source.name, target.name);
        }
        p.cross[s * p.n + t] = cross_error(source, target, cfg.train_for(source.name)).error;
    });
    return p;
}

using SubsetKey = std::vector<std::size_t>;  // sorted corpus indices

struct TopnJob {
    std::size_t target;
    SubsetKey members;
};

/// Union-training errors for every (target, member set) requested.
std::map<std::pair<std::size_t, SubsetKey>, double> union_errors(const std::vector<Corpus>& corpora,
                                                                 const std::vector<TopnJob>& jobs,
                                                                 const PipelineConfig& cfg) {
    std::set<std::pair<std::size_t, SubsetKey>> unique;
    for (const auto& j : jobs) unique.emplace(j.target, j.members);
    std::vector<std::pair<std::size_t, SubsetKey>> work(unique.begin(), unique.end());
    std::vector<double> values(work.size());
    parallel_for(work.size(), cfg.threads, [&](std::size_t i) {
        std::vector<const Corpus*> members;
        for (auto m : work[i].second) members.push_back(&corpora[m]);
        const Corpus pooled = union_corpus(members);
        values[i] = cross_error(pooled, corpora[work[i].first], cfg.train_for(pooled.name)).error;
    });
    std::map<std::pair<std::size_t, SubsetKey>, double> out;
    for (std::size_t i = 0; i < work.size(); ++i) out.emplace(std::move(work[i]), values[i]);
    return out;
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

Comparison compare(std::string name, const std::vector<double>& a, const std::vector<double>& b) {
    Comparison c{std::move(name), std::nullopt, ""};
    try {
        c.result = paired_ttest(a, b);
    } catch (const Error& e) {
        c.note = e.what();
    }
    return c;
}

struct RunPlan {
    std::vector<std::size_t> candidates;  ///< corpus indices, ascending
    std::vector<std::size_t> ranking;     ///< corpus indices, best first
};

}  // namespace

SelectionReport outer_loo_benchmark(const std::vector<Corpus>& corpora, const BenchConfig& cfg) {
    const std::size_t n = corpora.size();
    if (n < 4) throw Error("benchmark needs at least 4 corpora, got " + std::to_string(n));
    {
        std::set<std::string> names;
        for (const auto& c : corpora) {
            if (!c.fully_labeled()) throw Error("benchmark requires labels in " + c.name);
            if (!names.insert(c.name).second) throw Error("duplicate corpus name " + c.name);
        }
    }
    const std::size_t n_max = cfg.n_max.value_or(n - 1);
    if (cfg.topn && (n_max < 1 || n_max > n - 1)) throw Error("n_max must lie in 1..N-1");

    const bool use_model = cfg.predictor == PredictorMode::cmek;
    const PipelineConfig& pc = cfg.pipeline;
    const Panel panel = build_panel(corpora, pc, use_model);

    SelectionReport report;
    report.worst_k = cfg.worst_k;
    report.random_subsets = cfg.topn ? cfg.random_subsets : 0;
    report.seed = pc.seed;
    report.histogram_bin_width = cfg.histogram_bin_width;
    report.predictor = use_model ? "cmek" : "oracle";
    report.runs.resize(n);
    std::vector<RunPlan> plans(n);

    parallel_for(n, pc.threads, [&](std::size_t t) {
        RunResult& run = report.runs[t];
        RunPlan& plan = plans[t];
        run.target_name = corpora[t].name;
        for (std::size_t c = 0; c < n; ++c) {
            if (c != t) plan.candidates.push_back(c);
        }

        if (use_model) {
            std::vector<TrainingPair> pairs;
            for (auto s : plan.candidates) {
                for (auto u : plan.candidates) {
                    if (s != u) pairs.push_back({panel.feature(s, u), panel.error(s, u)});
                }
            }
            run.weights = fit_weights(pairs);
        }

        std::vector<RankedCandidate> scored;
        std::set<std::string> flags;
        for (auto c : plan.candidates) {
            const double truth = panel.error(c, t);
            const double predicted = use_model ? predict(*run.weights, panel.feature(c, t)) : truth;
            run.per_candidate_true_error[corpora[c].name] = truth;
            run.per_candidate_predicted[corpora[c].name] = predicted;
            scored.push_back({corpora[c].name, predicted});
            if (use_model) {
                for (const auto& f : panel.feature(c, t).flags) flags.insert(corpora[c].name + ": " + f);
            }
        }
        run.flags.assign(flags.begin(), flags.end());
        for (const auto& r : rank_candidates(scored, scored.size())) {
            run.selected.push_back(r.name);
            for (auto c : plan.candidates) {
                if (corpora[c].name == r.name) plan.ranking.push_back(c);
            }
        }
        run.selected_error = run.per_candidate_true_error.at(run.selected.front());
        run.best_error = run.selected_error;
        for (const auto& [name, e] : run.per_candidate_true_error) run.best_error = std::min(run.best_error, e);
        run.relative_error = run.selected_error - run.best_error;
    });

    // Union trainings: CMEK top-n, random n-subsets, and all candidates.
    std::vector<TopnJob> jobs;
    std::vector<std::vector<std::vector<SubsetKey>>> random_keys(n);
    for (std::size_t t = 0; t < n; ++t) {
        const auto& plan = plans[t];
        jobs.push_back({t, plan.candidates});
        if (!cfg.topn) continue;
        random_keys[t].resize(n_max + 1);
        for (std::size_t k = 1; k <= n_max; ++k) {
            SubsetKey top(plan.ranking.begin(), plan.ranking.begin() + static_cast<std::ptrdiff_t>(k));
            std::sort(top.begin(), top.end());
            jobs.push_back({t, top});
            for (std::size_t r = 0; r < cfg.random_subsets; ++r) {
                const auto pick = choose_indices(
                    derive_seed(pc.seed, "topn-random", corpora[t].name, std::to_string(k) + "/" + std::to_string(r)),
                    plan.candidates.size(), k);
                SubsetKey key;
                for (auto i : pick) key.push_back(plan.candidates[i]);
                random_keys[t][k].push_back(key);
                jobs.push_back({t, std::move(key)});
            }
        }
    }
    const auto unions = union_errors(corpora, jobs, pc);

    for (std::size_t t = 0; t < n; ++t) {
        auto& run = report.runs[t];
        const auto& plan = plans[t];
        run.all_domains_error = unions.at({t, plan.candidates});
        if (!cfg.topn) continue;
        for (std::size_t k = 1; k <= n_max; ++k) {
            SubsetKey top(plan.ranking.begin(), plan.ranking.begin() + static_cast<std::ptrdiff_t>(k));
            std::sort(top.begin(), top.end());
            TopnPoint point{k, unions.at({t, top}), 0.0, run.all_domains_error};
            if (!random_keys[t][k].empty()) {
                for (const auto& key : random_keys[t][k]) point.random_error += unions.at({t, key});
                point.random_error /= static_cast<double>(random_keys[t][k].size());
            }
            run.topn.push_back(point);
        }
    }

    // Aggregates over runs.
    const bool worst_applicable = n - 1 > cfg.worst_k;
    std::vector<double> cmek_err, random_err, all_err, best_err;
    double cmek_best = 0, cmek_worst = 0, rnd_best = 0, rnd_worst = 0, opt_worst = 0;
    for (const auto& run : report.runs) {
        const auto rb = random_baseline(run.per_candidate_true_error, cfg.worst_k);
        cmek_err.push_back(run.selected_error);
        random_err.push_back(rb.avg_error);
        all_err.push_back(run.all_domains_error);
        best_err.push_back(run.best_error);
        cmek_best += run.relative_error == 0.0 ? 1.0 : 0.0;
        cmek_worst += in_worst_k(run.per_candidate_true_error, run.selected_error, cfg.worst_k) ? 1.0 : 0.0;
        opt_worst += in_worst_k(run.per_candidate_true_error, run.best_error, cfg.worst_k) ? 1.0 : 0.0;
        rnd_best += rb.prob_best;
        rnd_worst += rb.prob_worstk;
    }
    const double runs = static_cast<double>(n);
    auto summary = [&](double best, double worst, const std::vector<double>& errs) {
        MethodSummary m;
        m.prob_best = best / runs;
        if (worst_applicable) m.prob_worstk = worst / runs;
        m.avg_abs_error = mean(errs);
        std::vector<double> rel(errs.size());
        for (std::size_t i = 0; i < errs.size(); ++i) rel[i] = errs[i] - best_err[i];
        m.avg_relative_error = mean(rel);
        return m;
    };
    report.cmek = summary(cmek_best, cmek_worst, cmek_err);
    report.random = summary(rnd_best, rnd_worst, random_err);
    report.optimal = summary(runs, opt_worst, best_err);

    report.ttests.push_back(compare("single_cmek_vs_random", cmek_err, random_err));
    report.ttests.push_back(compare("single_cmek_vs_all_domains", cmek_err, all_err));

    if (cfg.topn) {
        for (std::size_t k = 1; k <= n_max; ++k) {
            std::vector<double> c, r, a;
            for (const auto& run : report.runs) {
                c.push_back(run.topn[k - 1].cmek_error);
                r.push_back(run.topn[k - 1].random_error);
                a.push_back(run.topn[k - 1].all_domains_error);
            }
            report.topn_curve.push_back({k, mean(c), mean(r), mean(a)});
            report.ttests.push_back(compare("top" + std::to_string(k) + "_cmek_vs_random", c, r));
            report.ttests.push_back(compare("top" + std::to_string(k) + "_cmek_vs_all_domains", c, a));
        }
    }
    return report;
}

std::vector<TopnPoint> topn_curve(const std::vector<Corpus>& corpora, const BenchConfig& cfg, std::size_t n_max) {
    BenchConfig c = cfg;
    c.topn = true;
    c.n_max = n_max;
    return outer_loo_benchmark(corpora, c).topn_curve;
}

}  // namespace cmek
