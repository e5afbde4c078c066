#include "cmek/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "cmek/error.hpp"
#include "cmek/rng.hpp"

namespace cmek {

std::unordered_map<std::string, std::size_t> feature_counts(const Corpus& corpus) {
    std::unordered_map<std::string, std::size_t> counts;
    for (const auto& doc : corpus.documents) {
        for_each_feature(doc, [&](std::string_view f) { ++counts[std::string(f)]; });
    }
    return counts;
}

std::optional<std::uint32_t> Vocabulary::find(std::string_view term) const {
    auto it = index_.find(term);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

void Vocabulary::reindex() {
    index_.clear();
    index_.reserve(terms.size());
    for (std::size_t i = 0; i < terms.size(); ++i) {
        index_.emplace(terms[i], static_cast<std::uint32_t>(i));
    }
}

namespace {

struct TermStats {
    std::size_t count = 0;
    std::size_t doc_freq = 0;
    std::size_t last_doc = static_cast<std::size_t>(-1);
};

std::unordered_map<std::string, TermStats> term_stats(const Corpus& corpus) {
    std::unordered_map<std::string, TermStats> stats;
    for (std::size_t d = 0; d < corpus.size(); ++d) {
        for_each_feature(corpus.documents[d], [&](std::string_view f) {
            auto& s = stats[std::string(f)];
            ++s.count;
            if (s.last_doc != d) {
                s.last_doc = d;
                ++s.doc_freq;
            }
        });
    }
    return stats;
}

}  // namespace

Vocabulary build_vocabulary(const Corpus& corpus, std::size_t min_count, double max_df_fraction) {
    if (corpus.empty()) throw Error("build_vocabulary: empty corpus " + corpus.name);
    if (!(max_df_fraction > 0.0 && max_df_fraction <= 1.0)) {
        throw Error("build_vocabulary: max_df_fraction must lie in (0, 1]");
    }
    const double df_cap = max_df_fraction * static_cast<double>(corpus.size());

    std::vector<std::pair<std::string, std::size_t>> kept;
    for (auto& [term, s] : term_stats(corpus)) {
        if (s.count > min_count && static_cast<double>(s.doc_freq) <= df_cap) {
            kept.emplace_back(term, s.doc_freq);
        }
    }
    if (kept.empty()) throw Error("no features survive thresholds in " + corpus.name);
    std::sort(kept.begin(), kept.end());

    Vocabulary vocab;
    vocab.fit_documents = corpus.size();
    vocab.terms.reserve(kept.size());
    vocab.doc_freq.reserve(kept.size());
    for (auto& [term, df] : kept) {
        vocab.terms.push_back(std::move(term));
        vocab.doc_freq.push_back(df);
    }
    vocab.reindex();
    return vocab;
}

Vocabulary vocabulary_from_terms(std::vector<std::string> terms, const Corpus& corpus) {
    std::sort(terms.begin(), terms.end());
    if (std::adjacent_find(terms.begin(), terms.end()) != terms.end()) {
        throw Error("vocabulary_from_terms: duplicate term");
    }
    Vocabulary vocab;
    vocab.terms = std::move(terms);
    vocab.doc_freq.assign(vocab.terms.size(), 0);
    vocab.fit_documents = corpus.size();
    vocab.reindex();

    std::vector<std::size_t> last(vocab.size(), static_cast<std::size_t>(-1));
    for (std::size_t d = 0; d < corpus.size(); ++d) {
        for_each_feature(corpus.documents[d], [&](std::string_view f) {
            if (auto col = vocab.find(f); col && last[*col] != d) {
                last[*col] = d;
                ++vocab.doc_freq[*col];
            }
        });
    }
    return vocab;
}

double SparseRow::dot(std::span<const double> dense) const noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < cols.size(); ++i) s += vals[i] * dense[cols[i]];
    return s;
}

double SparseRow::squared_norm() const noexcept {
    double s = 0.0;
    for (double v : vals) s += v * v;
    return s;
}

std::vector<double> idf_weights(const Vocabulary& vocab) {
    std::vector<double> idf(vocab.size());
    const double n = static_cast<double>(vocab.fit_documents);
    for (std::size_t t = 0; t < vocab.size(); ++t) {
        idf[t] = 1.0 + std::log((1.0 + n) / (1.0 + static_cast<double>(vocab.doc_freq[t])));
    }
    return idf;
}

SparseRow count_row(const Document& doc, const Vocabulary& vocab) {
    std::vector<std::uint32_t> hits;
    for_each_feature(doc, [&](std::string_view f) {
        if (auto col = vocab.find(f)) hits.push_back(*col);
    });
    std::sort(hits.begin(), hits.end());

    SparseRow row;
    for (std::size_t i = 0; i < hits.size();) {
        std::size_t j = i;
        while (j < hits.size() && hits[j] == hits[i]) ++j;
        row.cols.push_back(hits[i]);
        row.vals.push_back(static_cast<double>(j - i));
        i = j;
    }
    return row;
}

SparseRow tfidf_row(const Document& doc, const Vocabulary& vocab, std::span<const double> idf) {
    SparseRow row = count_row(doc, vocab);
    for (std::size_t i = 0; i < row.nnz(); ++i) row.vals[i] *= idf[row.cols[i]];
    const double norm = std::sqrt(row.squared_norm());
    if (norm > 0.0) {
        for (double& v : row.vals) v /= norm;
    }
    return row;
}

DocVectorMatrix count_vectorize(const Corpus& corpus, const Vocabulary& vocab) {
    DocVectorMatrix m{vocab.size(), {}, Weighting::raw_count};
    m.rows.reserve(corpus.size());
    for (const auto& doc : corpus.documents) m.rows.push_back(count_row(doc, vocab));
    return m;
}

DocVectorMatrix tfidf_vectorize(const Corpus& corpus, const Vocabulary& vocab) {
    if (vocab.empty()) throw Error("tfidf_vectorize: empty vocabulary");
    const auto idf = idf_weights(vocab);
    return tfidf_vectorize(corpus, vocab, idf);
}

DocVectorMatrix tfidf_vectorize(const Corpus& corpus, const Vocabulary& vocab,
                                std::span<const double> idf) {
    DocVectorMatrix m{vocab.size(), {}, Weighting::tfidf};
    m.rows.reserve(corpus.size());
    for (const auto& doc : corpus.documents) m.rows.push_back(tfidf_row(doc, vocab, idf));
    return m;
}

std::vector<std::string> top_k_support(const Corpus& corpus_a, const Corpus& corpus_b, std::size_t k) {
    if (k == 0) throw Error("top_k_support: k must be at least 1");
    auto counts = feature_counts(corpus_a);
    for (const auto& doc : corpus_b.documents) {
        for_each_feature(doc, [&](std::string_view f) { ++counts[std::string(f)]; });
    }

    std::vector<std::pair<std::size_t, std::string>> ranked;
    ranked.reserve(counts.size());
    for (auto& [term, c] : counts) ranked.emplace_back(c, term);
    auto by_rank = [](const auto& x, const auto& y) {
        return x.first != y.first ? x.first > y.first : x.second < y.second;
    };
    const std::size_t take = std::min(k, ranked.size());
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(take), ranked.end(),
                      by_rank);

    std::vector<std::string> support;
    support.reserve(take);
    for (std::size_t i = 0; i < take; ++i) support.push_back(std::move(ranked[i].second));
    return support;
}

std::vector<std::size_t> support_counts(const Corpus& corpus, std::span<const std::string> support) {
    std::unordered_map<std::string_view, std::size_t> column;
    column.reserve(support.size());
    for (std::size_t i = 0; i < support.size(); ++i) column.emplace(support[i], i);

    std::vector<std::size_t> counts(support.size(), 0);
    for (const auto& doc : corpus.documents) {
        for_each_feature(doc, [&](std::string_view f) {
            if (auto it = column.find(f); it != column.end()) ++counts[it->second];
        });
    }
    return counts;
}

FeatureDistribution distribution_from_counts(std::vector<std::string> support,
                                             std::span<const std::size_t> counts,
                                             std::optional<std::size_t> token_budget,
                                             std::uint64_t seed) {
    if (support.empty()) throw Error("feature_distribution: empty support");
    if (counts.size() != support.size()) throw Error("feature_distribution: count/support size mismatch");

    std::vector<std::size_t> kept(counts.begin(), counts.end());
    std::size_t total = std::accumulate(kept.begin(), kept.end(), std::size_t{0});

    if (token_budget && total > *token_budget) {
        // Partial Fisher-Yates over the token multiset, laid out in support order.
        std::vector<std::uint32_t> tokens;
        tokens.reserve(total);
        for (std::size_t i = 0; i < kept.size(); ++i) {
            tokens.insert(tokens.end(), kept[i], static_cast<std::uint32_t>(i));
        }
        Rng rng(seed);
        std::fill(kept.begin(), kept.end(), 0);
        for (std::size_t i = 0; i < *token_budget; ++i) {
            const std::size_t j = i + rng.below(total - i);
            std::swap(tokens[i], tokens[j]);
            ++kept[tokens[i]];
        }
        total = *token_budget;
    }

    FeatureDistribution dist;
    dist.support = std::move(support);
    dist.token_total = total;
    dist.mass.resize(kept.size());
    if (total == 0) {
        dist.degenerate = true;
        std::fill(dist.mass.begin(), dist.mass.end(), 1.0 / static_cast<double>(kept.size()));
    } else {
        for (std::size_t i = 0; i < kept.size(); ++i) {
            dist.mass[i] = static_cast<double>(kept[i]) / static_cast<double>(total);
        }
    }
    return dist;
}

FeatureDistribution feature_distribution(const Corpus& corpus, std::span<const std::string> support,
                                         std::optional<std::size_t> token_budget, std::uint64_t seed) {
    const auto counts = support_counts(corpus, support);
    return distribution_from_counts({support.begin(), support.end()}, counts, token_budget, seed);
}

void write_distribution_csv(const FeatureDistribution& a, const FeatureDistribution& b,
                            const std::filesystem::path& path) {
    if (a.support != b.support) throw Error("write_distribution_csv: support mismatch");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out.precision(17);
    out << "feature,mass_a,mass_b\n";
    for (std::size_t i = 0; i < a.size(); ++i) {
        out << a.support[i] << ',' << a.mass[i] << ',' << b.mass[i] << '\n';
    }
}

}  // namespace cmek
