#include "cmek/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "cmek/error.hpp"

namespace cmek {

void TrainConfig::validate() const {
    if (!(alpha >= 0.0)) throw Error("alpha must be >= 0");
    if (!(tolerance > 0.0)) throw Error("tolerance must be > 0");
    if (!(max_df_fraction > 0.0 && max_df_fraction <= 1.0)) throw Error("max_df_fraction must lie in (0, 1]");
}

namespace {

/// ln(1 + e^z) without overflow.
double softplus(double z) {
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

/// 1 / (1 + e^-z) without overflow.
double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// Parameters are packed as [w_0 .. w_{d-1}, b].
class LogisticObjective {
public:
    LogisticObjective(const LogisticProblem& p, double alpha) : p_(p), alpha_(alpha) {}

    std::size_t dim() const { return p_.dim; }

    void scores(std::span<const double> theta, std::vector<double>& m) const {
        const double b = theta[p_.dim];
        m.resize(p_.rows.size());
        for (std::size_t r = 0; r < p_.rows.size(); ++r) m[r] = p_.rows[r].dot(theta) + b;
    }

    double value(std::span<const double> theta, const std::vector<double>& m) const {
        double f = 0.0;
        for (std::size_t r = 0; r < m.size(); ++r) {
            f += p_.positives[r] * softplus(-m[r]) + p_.negatives[r] * softplus(m[r]);
        }
        return f + 0.5 * alpha_ * dot(theta.first(p_.dim), theta.first(p_.dim));
    }

    /// Gradient into g; curvature weights per row into curvature.
    void gradient(std::span<const double> theta, const std::vector<double>& m, std::vector<double>& g,
                  std::vector<double>& curvature) const {
        g.assign(p_.dim + 1, 0.0);
        curvature.resize(m.size());
        for (std::size_t r = 0; r < m.size(); ++r) {
            const double s_pos = sigmoid(-m[r]);
            const double s_neg = sigmoid(m[r]);
            const double dz = p_.positives[r] * (-s_pos) + p_.negatives[r] * s_neg;
            curvature[r] = (p_.positives[r] + p_.negatives[r]) * s_pos * s_neg;
            const auto& row = p_.rows[r];
            for (std::size_t c = 0; c < row.nnz(); ++c) g[row.cols[c]] += dz * row.vals[c];
            g[p_.dim] += dz;
        }
        for (std::size_t j = 0; j < p_.dim; ++j) g[j] += alpha_ * theta[j];
    }

    void hessian_times(const std::vector<double>& curvature, std::span<const double> v,
                       std::vector<double>& out) const {
        out.assign(p_.dim + 1, 0.0);
        const double vb = v[p_.dim];
        for (std::size_t r = 0; r < p_.rows.size(); ++r) {
            const auto& row = p_.rows[r];
            const double t = curvature[r] * (row.dot(v) + vb);
            for (std::size_t c = 0; c < row.nnz(); ++c) out[row.cols[c]] += t * row.vals[c];
            out[p_.dim] += t;
        }
        for (std::size_t j = 0; j < p_.dim; ++j) out[j] += alpha_ * v[j];
    }

private:
    const LogisticProblem& p_;
    double alpha_;
};

/// Conjugate gradients for H d = -g, stopping at relative residual `rel_tol`.
std::vector<double> newton_direction(const LogisticObjective& obj, const std::vector<double>& curvature,
                                     const std::vector<double>& g, double rel_tol, std::size_t max_steps) {
    const std::size_t n = g.size();
    std::vector<double> d(n, 0.0), r(n), p(n), hp;
    for (std::size_t i = 0; i < n; ++i) r[i] = -g[i];
    p = r;
    double rr = dot(r, r);
    const double stop = rel_tol * rel_tol * rr;
    for (std::size_t step = 0; step < max_steps && rr > stop; ++step) {
        obj.hessian_times(curvature, p, hp);
        const double php = dot(p, hp);
        if (!(php > 0.0)) break;
        const double a = rr / php;
        for (std::size_t i = 0; i < n; ++i) {
            d[i] += a * p[i];
            r[i] -= a * hp[i];
        }
        const double rr_next = dot(r, r);
        const double beta = rr_next / rr;
        rr = rr_next;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    }
    return d;
}

}  // namespace

double logistic_objective(const LogisticProblem& problem, double alpha, std::span<const double> weights,
                          double bias) {
    std::vector<double> theta(weights.begin(), weights.end());
    theta.push_back(bias);
    LogisticObjective obj(problem, alpha);
    std::vector<double> m;
    obj.scores(theta, m);
    return obj.value(theta, m);
}

LogisticFit fit_logistic(const LogisticProblem& problem, double alpha, std::size_t max_iterations,
                         double tolerance, bool trace_objective) {
    if (problem.rows.size() != problem.positives.size() || problem.rows.size() != problem.negatives.size()) {
        throw Error("fit_logistic: inconsistent problem");
    }
    const LogisticObjective obj(problem, alpha);
    const std::size_t n = problem.dim + 1;

    std::vector<double> theta(n, 0.0), m, g, curvature, trial(n), m_trial;
    obj.scores(theta, m);
    double f = obj.value(theta, m);

    LogisticFit fit;
    if (trace_objective) fit.objective_trace.push_back(f);

    for (;;) {
        obj.gradient(theta, m, g, curvature);
        const double gnorm = norm2(g);
        fit.gradient_norm = gnorm;
        if (gnorm <= tolerance) {
            fit.converged = true;
            break;
        }
        if (fit.iterations >= max_iterations) break;

        auto d = newton_direction(obj, curvature, g, std::min(0.1, std::sqrt(gnorm)), 2 * n + 10);
        double slope = dot(g, d);
        if (!(slope < 0.0)) {
            for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
            slope = -gnorm * gnorm;
        }

        // Backtracking Armijo search; a step is taken only if it lowers f.
        double step = 1.0;
        bool accepted = false;
        double f_trial = f;
        for (int halving = 0; halving < 60; ++halving, step *= 0.5) {
            for (std::size_t i = 0; i < n; ++i) trial[i] = theta[i] + step * d[i];
            obj.scores(trial, m_trial);
            f_trial = obj.value(trial, m_trial);
            if (f_trial <= f + 1e-4 * step * slope && f_trial < f) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            // Near the optimum the decrease in f drops below its rounding;
            // fall back to judging the full step by the gradient it leaves.
            for (std::size_t i = 0; i < n; ++i) trial[i] = theta[i] + d[i];
            obj.scores(trial, m_trial);
            f_trial = obj.value(trial, m_trial);
            std::vector<double> g_trial, c_trial;
            obj.gradient(trial, m_trial, g_trial, c_trial);
            accepted = f_trial <= f + 4 * std::numeric_limits<double>::epsilon() * std::abs(f) &&
                       norm2(g_trial) < 0.5 * gnorm;
        }
        ++fit.iterations;
        if (!accepted) break;
        theta.swap(trial);
        m.swap(m_trial);
        f = f_trial;
        if (trace_objective) fit.objective_trace.push_back(f);
    }

    fit.objective = f;
    fit.bias = theta[problem.dim];
    theta.pop_back();
    fit.weights = std::move(theta);
    return fit;
}

Hypothesis train(const Corpus& corpus, const TrainConfig& cfg) {
    cfg.validate();
    if (!corpus.fully_labeled()) throw Error("train requires labels in " + corpus.name);
    const auto counts = corpus.class_counts();
    if (counts[0] == 0 || counts[1] == 0) throw Error("train needs both classes in " + corpus.name);

    Hypothesis h;
    h.vocab = build_vocabulary(corpus, cfg.min_count, cfg.max_df_fraction);
    h.idf = idf_weights(h.vocab);

    std::map<std::vector<std::string>, std::pair<double, double>> groups;
    for (const auto& doc : corpus.documents) {
        auto& [pos, neg] = groups[doc.tokens];
        (*doc.label == 1 ? pos : neg) += 1.0;
    }

    LogisticProblem problem;
    problem.dim = h.vocab.size();
    problem.rows.reserve(groups.size());
    Document scratch;
    for (auto& [tokens, pn] : groups) {
        scratch.tokens = tokens;
        problem.rows.push_back(tfidf_row(scratch, h.vocab, h.idf));
        problem.positives.push_back(pn.first);
        problem.negatives.push_back(pn.second);
    }

    auto fit = fit_logistic(problem, cfg.alpha, cfg.max_iterations, cfg.tolerance);
    h.weights = std::move(fit.weights);
    h.bias = fit.bias;
    h.converged = fit.converged;
    h.iterations = fit.iterations;
    h.gradient_norm = fit.gradient_norm;
    return h;
}

double decision_value(const Hypothesis& h, const Document& doc) {
    return tfidf_row(doc, h.vocab, h.idf).dot(h.weights) + h.bias;
}

int classify(const Hypothesis& h, const Document& doc) { return decision_value(h, doc) > 0.0 ? 1 : 0; }

ErrorEstimate holdout_error(const Hypothesis& h, const Corpus& corpus) {
    ErrorEstimate e;
    e.kind = ErrorKind::holdout;
    for (const auto& doc : corpus.documents) {
        if (!doc.label) throw Error("scoring requires labels in " + corpus.name);
        if (classify(h, doc) != *doc.label) ++e.n_misclassified;
    }
    e.n_evaluated = corpus.size();
    if (e.n_evaluated == 0) throw Error("cannot score an empty corpus");
    e.error = static_cast<double>(e.n_misclassified) / static_cast<double>(e.n_evaluated);
    return e;
}

ErrorEstimate inner_error(const Corpus& corpus, const TrainConfig& cfg, std::size_t folds) {
    if (!corpus.fully_labeled()) throw Error("inner_error requires labels in " + corpus.name);
    const auto counts = corpus.class_counts();
    if (folds > std::min(counts[0], counts[1])) {
        throw Error("fold count " + std::to_string(folds) + " exceeds the smallest class of " + corpus.name);
    }

    ErrorEstimate total;
    total.kind = ErrorKind::inner_cv;
    for (const auto& fold : stratified_folds(corpus, {folds, cfg.seed})) {
        Corpus train_part{corpus.name, {}, corpus.provenance};
        train_part.documents.reserve(fold.train.size());
        for (auto i : fold.train) train_part.documents.push_back(corpus.documents[i]);
        const Hypothesis h = train(train_part, cfg);
        for (auto i : fold.test) {
            const auto& doc = corpus.documents[i];
            if (classify(h, doc) != *doc.label) ++total.n_misclassified;
        }
    }
    total.n_evaluated = corpus.size();
    total.error = static_cast<double>(total.n_misclassified) / static_cast<double>(total.n_evaluated);
    return total;
}

ErrorEstimate cross_error(const Corpus& source, const Corpus& target, const TrainConfig& cfg) {
    if (!target.fully_labeled()) throw Error("cross_error requires labels on target " + target.name);
    auto e = holdout_error(train(source, cfg), target);
    e.kind = ErrorKind::cross_domain;
    return e;
}

nlohmann::json hypothesis_to_json(const Hypothesis& h) {
    return {{"terms", h.vocab.terms},
            {"doc_freq", h.vocab.doc_freq},
            {"fit_documents", h.vocab.fit_documents},
            {"idf", h.idf},
            {"weights", h.weights},
            {"bias", h.bias}};
}

Hypothesis hypothesis_from_json(const nlohmann::json& j) {
    Hypothesis h;
    try {
        h.vocab.terms = j.at("terms").get<std::vector<std::string>>();
        h.idf = j.at("idf").get<std::vector<double>>();
        h.weights = j.at("weights").get<std::vector<double>>();
        h.bias = j.at("bias").get<double>();
        h.vocab.doc_freq = j.value("doc_freq", std::vector<std::size_t>(h.vocab.terms.size(), 0));
        h.vocab.fit_documents = j.value("fit_documents", std::size_t{0});
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed hypothesis JSON: ") + e.what());
    }
    const std::size_t n = h.vocab.terms.size();
    if (h.idf.size() != n || h.weights.size() != n || h.vocab.doc_freq.size() != n) {
        throw Error("malformed hypothesis JSON: array lengths differ");
    }
    h.vocab.reindex();
    h.converged = true;
    return h;
}

}  // namespace cmek
