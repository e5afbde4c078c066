#pragma once

#include <string>
#include <vector>

#include "cmek/corpus.hpp"
#include "cmek/rng.hpp"

namespace cmek::testing {

inline std::string filler_text(Rng& rng, const std::string& prefix, std::size_t words, std::size_t vocab) {
    std::string text;
    for (std::size_t i = 0; i < words; ++i) {
        if (i) text += ' ';
        text += prefix + std::to_string(rng.below(vocab));
    }
    return text;
}

/// `n` documents of random filler; a `positive_rate` share carries label 1
/// and the word "good", the rest label 0 and no marker.
inline Corpus separable_corpus(std::uint64_t seed, std::size_t n = 200, double positive_rate = 0.3,
                               const std::string& prefix = "w", std::string name = "separable") {
    Rng rng(seed);
    std::vector<std::pair<std::string, std::optional<int>>> rows;
    const auto positives = static_cast<std::size_t>(positive_rate * static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const int label = i < positives ? 1 : 0;
        std::string text = filler_text(rng, prefix, 2, 30);
        if (label) text += " good";
        rows.emplace_back(text, label);
    }
    return make_corpus(std::move(name), rows);
}

/// Filler documents whose labels are fair coin flips, independent of text.
inline Corpus random_label_corpus(std::uint64_t seed, std::size_t n = 500) {
    Rng rng(seed);
    std::vector<std::pair<std::string, std::optional<int>>> rows;
    for (std::size_t i = 0; i < n; ++i) {
        rows.emplace_back(filler_text(rng, "w", 10, 300), static_cast<int>(rng.below(2)));
    }
    return make_corpus("random", rows);
}

/// Every text twice, once per label.
inline Corpus contradictory_corpus(std::uint64_t seed, std::size_t pairs = 50) {
    Rng rng(seed);
    std::vector<std::pair<std::string, std::optional<int>>> rows;
    for (std::size_t i = 0; i < pairs; ++i) {
        const std::string text = filler_text(rng, "w", 6, 40);
        rows.emplace_back(text, 1);
        rows.emplace_back(text, 0);
    }
    return make_corpus("contradictory", rows);
}

inline Corpus flip_labels(const Corpus& c) {
    Corpus out = c;
    for (auto& d : out.documents) d.label = 1 - *d.label;
    return out;
}

}  // namespace cmek::testing
