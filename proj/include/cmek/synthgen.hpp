#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "cmek/corpus.hpp"

namespace cmek {

/// Generator settings for one synthetic sentiment domain.
struct DomainSpec {
    std::uint64_t seed = 1;
    std::size_t n_docs = 1000;      ///< even; classes are exactly balanced
    std::size_t doc_len_min = 20;
    std::size_t doc_len_max = 40;
    std::size_t vocab = 2000;       ///< shared neutral words, Zipf-distributed
    std::size_t n_sentiment_words = 50;  ///< per polarity
    double shift = 0.0;             ///< share of the reference lexicon replaced, in [0, 1]
    double noise = 0.0;             ///< label flip probability, in [0, 0.5]
    double sentiment_rate = 0.15;   ///< probability a token is a sentiment word

    void validate() const;
};

/// Word lists shared by a family: neutral vocabulary and reference lexicon.
struct Lexicon {
    std::vector<std::string> neutral;
    std::vector<std::string> positive;
    std::vector<std::string> negative;
};

Lexicon reference_lexicon(std::uint64_t reference_seed, const DomainSpec& spec);

/// One domain drawn from the reference lexicon with spec.shift of each
/// polarity's words swapped for fresh ones. Deterministic in (lexicon, spec).
Corpus generate_domain(const Lexicon& reference, const DomainSpec& spec, std::string name);

struct SyntheticFamily {
    std::vector<Corpus> corpora;
    std::vector<DomainSpec> specs;
    nlohmann::json sidecar;  ///< every generator parameter, for reproduction
};

/// Domains i = 0..|shifts|-1 named "<prefix><i>", domain seeds derived from
/// (tmpl.seed, i), all sharing the lexicon built from reference_seed.
SyntheticFamily generate_family(std::uint64_t reference_seed, std::span<const double> shifts,
                                const DomainSpec& tmpl, const std::string& name_prefix = "synth");

}  // namespace cmek
