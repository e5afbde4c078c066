#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cmek/corpus.hpp"

namespace cmek {

/// Calls fn(feature) for every unigram of `doc` in order, then every
/// adjacent-pair bigram rendered as "left right".
template <class Fn>
void for_each_feature(const Document& doc, Fn&& fn) {
    for (const auto& t : doc.tokens) fn(std::string_view(t));
    std::string bigram;
    for (std::size_t i = 1; i < doc.tokens.size(); ++i) {
        bigram.assign(doc.tokens[i - 1]);
        bigram.push_back(' ');
        bigram += doc.tokens[i];
        fn(std::string_view(bigram));
    }
}

/// Raw occurrence counts of every unigram and bigram in the corpus.
std::unordered_map<std::string, std::size_t> feature_counts(const Corpus& corpus);

/// Column space of a bag-of-words model, fit on one corpus.
struct Vocabulary {
    std::vector<std::string> terms;  ///< lexicographic
    std::vector<std::size_t> doc_freq;
    std::size_t fit_documents = 0;

    std::size_t size() const noexcept { return terms.size(); }
    bool empty() const noexcept { return terms.empty(); }
    std::optional<std::uint32_t> find(std::string_view term) const;

    /// Rebuilds the term → column lookup; call after editing `terms`.
    void reindex();

private:
    struct Hash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const noexcept {
            return std::hash<std::string_view>{}(s);
        }
    };
    std::unordered_map<std::string, std::uint32_t, Hash, std::equal_to<>> index_;
};

inline constexpr std::size_t kDefaultMinCount = 4;
inline constexpr double kDefaultMaxDfFraction = 0.40;

/// Unigrams and bigrams whose total count exceeds `min_count` (strictly) and
/// whose document frequency is at most max_df_fraction * |corpus|.
Vocabulary build_vocabulary(const Corpus& corpus, std::size_t min_count = kDefaultMinCount,
                            double max_df_fraction = kDefaultMaxDfFraction);

/// Vocabulary over a fixed term list, with document frequencies counted on
/// `corpus`. Terms are sorted; duplicates rejected.
Vocabulary vocabulary_from_terms(std::vector<std::string> terms, const Corpus& corpus);

struct SparseRow {
    std::vector<std::uint32_t> cols;  ///< strictly increasing
    std::vector<double> vals;

    std::size_t nnz() const noexcept { return cols.size(); }
    double dot(std::span<const double> dense) const noexcept;
    double squared_norm() const noexcept;
};

enum class Weighting { raw_count, tfidf };

struct DocVectorMatrix {
    std::size_t dim = 0;
    std::vector<SparseRow> rows;
    Weighting weighting = Weighting::tfidf;

    std::size_t size() const noexcept { return rows.size(); }
};

/// Smoothed idf 1 + ln((1 + N) / (1 + df)) per vocabulary term.
std::vector<double> idf_weights(const Vocabulary& vocab);

/// Raw counts of in-vocabulary features; out-of-vocabulary features dropped.
SparseRow count_row(const Document& doc, const Vocabulary& vocab);

/// count * idf, then scaled to unit L2 norm (zero rows stay zero).
SparseRow tfidf_row(const Document& doc, const Vocabulary& vocab, std::span<const double> idf);

DocVectorMatrix count_vectorize(const Corpus& corpus, const Vocabulary& vocab);
DocVectorMatrix tfidf_vectorize(const Corpus& corpus, const Vocabulary& vocab);
DocVectorMatrix tfidf_vectorize(const Corpus& corpus, const Vocabulary& vocab,
                                std::span<const double> idf);

/// The k features with the highest summed raw count over both corpora,
/// ranked by count descending then lexicographically.
std::vector<std::string> top_k_support(const Corpus& corpus_a, const Corpus& corpus_b, std::size_t k);

/// Probability vector over an ordered feature support.
struct FeatureDistribution {
    std::vector<std::string> support;
    std::vector<double> mass;
    std::size_t token_total = 0;  ///< support tokens behind `mass`, after subsampling
    bool degenerate = false;      ///< no support feature occurred; mass is uniform

    std::size_t size() const noexcept { return mass.size(); }
};

/// Per-feature counts of `support` over the corpus, in support order.
std::vector<std::size_t> support_counts(const Corpus& corpus, std::span<const std::string> support);

/// Normalized support counts. With a token budget smaller than the support
/// token total, tokens are first subsampled without replacement to the budget.
FeatureDistribution feature_distribution(const Corpus& corpus, std::span<const std::string> support,
                                         std::optional<std::size_t> token_budget, std::uint64_t seed);

/// Same, from precomputed support counts.
FeatureDistribution distribution_from_counts(std::vector<std::string> support,
                                             std::span<const std::size_t> counts,
                                             std::optional<std::size_t> token_budget,
                                             std::uint64_t seed);

/// Inspection dump with header "feature,mass_a,mass_b".
void write_distribution_csv(const FeatureDistribution& a, const FeatureDistribution& b,
                            const std::filesystem::path& path);

}  // namespace cmek
