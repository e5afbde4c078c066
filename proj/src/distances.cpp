#include "cmek/distances.hpp"

#include <algorithm>
#include <cmath>

#include "cmek/error.hpp"
#include "cmek/rng.hpp"

namespace cmek {

void GroundMatrix::validate() const {
    if (cost.size() != dim * dim) throw Error("ground matrix is not square");
    for (std::size_t i = 0; i < dim; ++i) {
        if ((*this)(i, i) != 0.0) throw Error("ground matrix diagonal must be zero");
        for (std::size_t j = 0; j < dim; ++j) {
            const double c = (*this)(i, j);
            if (!std::isfinite(c) || c < 0.0) throw Error("ground matrix entries must be finite and >= 0");
            if (c != (*this)(j, i)) throw Error("ground matrix must be symmetric");
        }
    }
}

GroundMatrix GroundMatrix::binary(std::size_t dim) {
    GroundMatrix g{dim, std::vector<double>(dim * dim, 1.0)};
    for (std::size_t i = 0; i < dim; ++i) g.cost[i * dim + i] = 0.0;
    return g;
}

void DistanceConfig::validate() const {
    if (!(chi2_lambda > 0.0) || !(kld_lambda > 0.0)) throw Error("smoothing lambdas must be > 0");
    if (mmd_sigma && !(*mmd_sigma > 0.0)) throw Error("mmd_sigma must be > 0 when set");
    if (mmd_max_samples < 2) throw Error("mmd_max_samples must be >= 2");
    if (ground_matrix) ground_matrix->validate();
}

FeatureDistribution smooth(const FeatureDistribution& p, double lambda) {
    if (lambda < 0.0) throw Error("smooth: lambda must be non-negative");
    FeatureDistribution out = p;
    const double denom = 1.0 + static_cast<double>(p.size()) * lambda;
    for (double& m : out.mass) m = (m + lambda) / denom;
    return out;
}

namespace {

void require_shared_support(const FeatureDistribution& p, const FeatureDistribution& q) {
    if (p.size() != q.size() || p.support != q.support) {
        throw Error("distributions do not share a support");
    }
}

}  // namespace

double chi2_divergence(const FeatureDistribution& p, const FeatureDistribution& q,
                       const DistanceConfig& cfg) {
    require_shared_support(p, q);
    const auto ps = smooth(p, cfg.chi2_lambda);
    const auto qs = smooth(q, cfg.chi2_lambda);
    double sum = 0.0;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const double d = ps.mass[i] - qs.mass[i];
        if (d != 0.0) sum += d * d / qs.mass[i];
    }
    return sum;
}

double kl_divergence(const FeatureDistribution& p, const FeatureDistribution& q,
                     const DistanceConfig& cfg) {
    require_shared_support(p, q);
    const auto ps = smooth(p, cfg.kld_lambda);
    const auto qs = smooth(q, cfg.kld_lambda);
    double sum = 0.0;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        if (ps.mass[i] > 0.0 && ps.mass[i] != qs.mass[i]) {
            sum += ps.mass[i] * std::log(ps.mass[i] / qs.mass[i]);
        }
    }
    // Rounding can leave a tiny negative residue when p and q nearly agree.
    return std::max(sum, 0.0);
}

double emd(const FeatureDistribution& p, const FeatureDistribution& q, const DistanceConfig& cfg) {
    require_shared_support(p, q);
    if (!cfg.ground_matrix) {
        double l1 = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) l1 += std::abs(p.mass[i] - q.mass[i]);
        return 0.5 * l1;
    }
    if (cfg.ground_matrix->dim != p.size()) {
        throw Error("ground matrix dimension " + std::to_string(cfg.ground_matrix->dim) +
                    " does not match support size " + std::to_string(p.size()));
    }
    return transport_cost(p.mass, q.mass, *cfg.ground_matrix);
}

namespace {

/// Subset of rows by sorted index list.
std::vector<const SparseRow*> pick(const DocVectorMatrix& m, const std::vector<std::size_t>& idx) {
    std::vector<const SparseRow*> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(&m.rows[i]);
    return out;
}

/// Squared euclidean distances between every x in xs and every y in ys,
/// row-major |xs| x |ys|.
std::vector<double> squared_distances(const std::vector<const SparseRow*>& xs,
                                      const std::vector<const SparseRow*>& ys, std::size_t dim) {
    std::vector<double> y_norm(ys.size());
    for (std::size_t j = 0; j < ys.size(); ++j) y_norm[j] = ys[j]->squared_norm();

    std::vector<double> out(xs.size() * ys.size());
    std::vector<double> scratch(dim, 0.0);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const SparseRow& x = *xs[i];
        for (std::size_t c = 0; c < x.nnz(); ++c) scratch[x.cols[c]] = x.vals[c];
        const double x_norm = x.squared_norm();
        for (std::size_t j = 0; j < ys.size(); ++j) {
            const double d2 = x_norm + y_norm[j] - 2.0 * ys[j]->dot(scratch);
            out[i * ys.size() + j] = std::max(d2, 0.0);
        }
        for (auto c : x.cols) scratch[c] = 0.0;
    }
    return out;
}

double kernel_sum(const std::vector<double>& d2, double inv_two_sigma2) {
    double s = 0.0;
    for (double v : d2) s += std::exp(-v * inv_two_sigma2);
    return s;
}

double median_in_place(std::vector<double>& v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double upper = v[mid];
    if (v.size() % 2 == 1) return upper;
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

constexpr std::size_t kMedianPointsPerSide = 1000;

}  // namespace

MmdResult mmd(const DocVectorMatrix& samples_a, const DocVectorMatrix& samples_b,
              const DistanceConfig& cfg, std::uint64_t seed) {
    if (samples_a.size() == 0 || samples_b.size() == 0) throw Error("mmd: empty sample set");
    if (samples_a.dim != samples_b.dim) throw Error("mmd: sample dimensions differ");
    if (cfg.mmd_max_samples < 1) throw Error("mmd: mmd_max_samples must be positive");

    // Index choice depends only on (seed, size, keep) so mmd(a, b) = mmd(b, a).
    const std::uint64_t cap_seed = derive_seed(seed, "mmd-cap");
    const std::size_t n = std::min({samples_a.size(), samples_b.size(), cfg.mmd_max_samples});
    const auto a = pick(samples_a, choose_indices(cap_seed, samples_a.size(), n));
    const auto b = pick(samples_b, choose_indices(cap_seed, samples_b.size(), n));

    const auto d_aa = squared_distances(a, a, samples_a.dim);
    const auto d_bb = squared_distances(b, b, samples_a.dim);
    const auto d_ab = squared_distances(a, b, samples_a.dim);

    MmdResult result;
    result.samples_per_side = n;
    if (cfg.mmd_sigma) {
        result.sigma = *cfg.mmd_sigma;
    } else {
        // Median pairwise distance over the pooled sample (unordered pairs).
        std::vector<double> pooled;
        std::size_t m = n;
        std::vector<std::size_t> sub;
        if (n > kMedianPointsPerSide) {
            m = kMedianPointsPerSide;
            sub = choose_indices(derive_seed(seed, "mmd-median"), n, m);
        } else {
            sub.resize(n);
            for (std::size_t i = 0; i < n; ++i) sub[i] = i;
        }
        pooled.reserve(m * (2 * m - 1));
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = i + 1; j < m; ++j) {
                pooled.push_back(std::sqrt(d_aa[sub[i] * n + sub[j]]));
                pooled.push_back(std::sqrt(d_bb[sub[i] * n + sub[j]]));
            }
            for (std::size_t j = 0; j < m; ++j) pooled.push_back(std::sqrt(d_ab[sub[i] * n + sub[j]]));
        }
        result.sigma = median_in_place(pooled);
    }

    if (!(result.sigma > 0.0)) {
        result.degenerate = true;
        result.value = 0.0;
        return result;
    }

    const double inv = 1.0 / (2.0 * result.sigma * result.sigma);
    const double nn = static_cast<double>(n) * static_cast<double>(n);
    const double stat =
        kernel_sum(d_aa, inv) / nn + kernel_sum(d_bb, inv) / nn - 2.0 * kernel_sum(d_ab, inv) / nn;
    result.value = std::sqrt(std::max(stat, 0.0));
    return result;
}

namespace {

/// Vocabulary over `support` with document frequencies pooled over both corpora.
Vocabulary pooled_vocabulary(const std::vector<std::string>& support, const Corpus& a, const Corpus& b) {
    Vocabulary va = vocabulary_from_terms(support, a);
    const Vocabulary vb = vocabulary_from_terms(support, b);
    for (std::size_t t = 0; t < va.size(); ++t) va.doc_freq[t] += vb.doc_freq[t];
    va.fit_documents += vb.fit_documents;
    return va;
}

}  // namespace

DistanceVector distance_vector(const Corpus& source, const Corpus& target, const DistanceConfig& cfg,
                               std::size_t k, std::uint64_t seed) {
    if (source.empty() || target.empty()) throw Error("distance_vector: empty corpus");
    DistanceVector out;

    const auto support = top_k_support(source, target, k);
    const auto counts_s = support_counts(source, support);
    const auto counts_t = support_counts(target, support);
    std::size_t total_s = 0, total_t = 0;
    for (auto c : counts_s) total_s += c;
    for (auto c : counts_t) total_t += c;

    std::optional<std::size_t> budget;
    if (total_s > 0 && total_t > 0) {
        budget = std::min(total_s, total_t);
    } else {
        out.degenerate_flags.insert("unmatched_token_budget");
    }
    const auto p = distribution_from_counts(support, counts_s, budget, derive_seed(seed, "tokens-source"));
    const auto q = distribution_from_counts(support, counts_t, budget, derive_seed(seed, "tokens-target"));
    if (p.degenerate) out.degenerate_flags.insert("source_zero_support");
    if (q.degenerate) out.degenerate_flags.insert("target_zero_support");

    out.chi2 = chi2_divergence(p, q, cfg);
    out.kld = kl_divergence(p, q, cfg);
    out.emd = emd(p, q, cfg);

    const Vocabulary vocab = pooled_vocabulary(support, source, target);
    const auto idf = idf_weights(vocab);
    const auto rows_s = tfidf_vectorize(source, vocab, idf);
    const auto rows_t = tfidf_vectorize(target, vocab, idf);
    const auto m = mmd(rows_s, rows_t, cfg, derive_seed(seed, "mmd"));
    out.mmd = m.value;
    if (m.degenerate) out.degenerate_flags.insert("mmd_zero_bandwidth");
    return out;
}

}  // namespace cmek
