#pragma once

// Straight-line reference formulas over dense vectors, used to cross-check
// the library's implementations.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "cmek/corpus.hpp"

namespace cmek::testing {

inline std::vector<double> ref_smooth(const std::vector<double>& p, double lambda) {
    std::vector<double> out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) out[i] = (p[i] + lambda) / (1.0 + lambda * p.size());
    return out;
}

inline double ref_chi2(const std::vector<double>& p, const std::vector<double>& q, double lambda) {
    const auto ps = ref_smooth(p, lambda), qs = ref_smooth(q, lambda);
    double s = 0;
    for (std::size_t i = 0; i < p.size(); ++i) s += (ps[i] - qs[i]) * (ps[i] - qs[i]) / qs[i];
    return s;
}

inline double ref_kld(const std::vector<double>& p, const std::vector<double>& q, double lambda) {
    const auto ps = ref_smooth(p, lambda), qs = ref_smooth(q, lambda);
    double s = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (ps[i] > 0) s += ps[i] * std::log(ps[i] / qs[i]);
    }
    return s;
}

using Dense = std::vector<std::vector<double>>;

inline double ref_sqdist(const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
    return s;
}

/// Biased MMD with exp(-d^2 / (2 sigma^2)), by direct double sum.
inline double ref_mmd(const Dense& a, const Dense& b, double sigma) {
    auto k = [&](const std::vector<double>& x, const std::vector<double>& y) {
        return std::exp(-ref_sqdist(x, y) / (2 * sigma * sigma));
    };
    double aa = 0, bb = 0, ab = 0;
    for (const auto& x : a)
        for (const auto& y : a) aa += k(x, y);
    for (const auto& x : b)
        for (const auto& y : b) bb += k(x, y);
    for (const auto& x : a)
        for (const auto& y : b) ab += k(x, y);
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    return std::sqrt(std::max(aa / (na * na) + bb / (nb * nb) - 2 * ab / (na * nb), 0.0));
}

/// Median of all pairwise distances within a, within b, and across.
inline double ref_median_sigma(const Dense& a, const Dense& b) {
    std::vector<double> d;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = i + 1; j < a.size(); ++j) d.push_back(std::sqrt(ref_sqdist(a[i], a[j])));
    for (std::size_t i = 0; i < b.size(); ++i)
        for (std::size_t j = i + 1; j < b.size(); ++j) d.push_back(std::sqrt(ref_sqdist(b[i], b[j])));
    for (const auto& x : a)
        for (const auto& y : b) d.push_back(std::sqrt(ref_sqdist(x, y)));
    std::sort(d.begin(), d.end());
    const std::size_t n = d.size();
    return n % 2 ? d[n / 2] : 0.5 * (d[n / 2 - 1] + d[n / 2]);
}

/// Unigram and bigram counts of a document, keyed by feature string.
inline std::map<std::string, double> ref_features(const Document& doc) {
    std::map<std::string, double> f;
    for (const auto& t : doc.tokens) f[t] += 1;
    for (std::size_t i = 1; i < doc.tokens.size(); ++i) f[doc.tokens[i - 1] + " " + doc.tokens[i]] += 1;
    return f;
}

/// Dense tf-idf rows over `support`, idf from document frequencies pooled
/// over both corpora, rows scaled to unit length.
inline std::pair<Dense, Dense> ref_tfidf_pair(const Corpus& a, const Corpus& b,
                                              const std::vector<std::string>& support) {
    std::vector<double> df(support.size(), 0);
    std::vector<std::vector<std::map<std::string, double>>> feats(2);
    for (int side = 0; side < 2; ++side) {
        for (const auto& doc : (side ? b : a).documents) feats[side].push_back(ref_features(doc));
    }
    for (const auto& side : feats)
        for (const auto& f : side)
            for (std::size_t t = 0; t < support.size(); ++t) df[t] += f.count(support[t]) ? 1 : 0;
    const double n = static_cast<double>(a.size() + b.size());
    std::pair<Dense, Dense> out;
    for (int side = 0; side < 2; ++side) {
        Dense& rows = side ? out.second : out.first;
        for (const auto& f : feats[side]) {
            std::vector<double> row(support.size(), 0);
            double norm = 0;
            for (std::size_t t = 0; t < support.size(); ++t) {
                auto it = f.find(support[t]);
                if (it == f.end()) continue;
                row[t] = it->second * (1 + std::log((1 + n) / (1 + df[t])));
                norm += row[t] * row[t];
            }
            if (norm > 0)
                for (auto& v : row) v /= std::sqrt(norm);
            rows.push_back(row);
        }
    }
    return out;
}

}  // namespace cmek::testing
