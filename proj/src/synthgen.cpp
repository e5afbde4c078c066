#include "cmek/synthgen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

#include "cmek/error.hpp"
#include "cmek/rng.hpp"

namespace cmek {

void DomainSpec::validate() const {
    if (n_docs < 4 || n_docs % 2 != 0) throw Error("synthgen: n_docs must be even and at least 4");
    if (doc_len_min < 1 || doc_len_min > doc_len_max) throw Error("synthgen: invalid document length range");
    if (vocab < 1 || n_sentiment_words < 1) throw Error("synthgen: vocabulary sizes must be positive");
    if (!(shift >= 0.0 && shift <= 1.0)) throw Error("synthgen: shift must lie in [0, 1]");
    if (!(noise >= 0.0 && noise <= 0.5)) throw Error("synthgen: noise must lie in [0, 0.5]");
    if (!(sentiment_rate >= 0.0 && sentiment_rate <= 1.0)) throw Error("synthgen: sentiment_rate must lie in [0, 1]");
}

namespace {

std::string fresh_word(Rng& rng, std::set<std::string>& taken) {
    for (;;) {
        const std::size_t len = 5 + rng.below(4);
        std::string w(len, 'a');
        for (auto& ch : w) ch = static_cast<char>('a' + rng.below(26));
        if (taken.insert(w).second) return w;
    }
}

std::vector<std::string> fresh_words(Rng& rng, std::set<std::string>& taken, std::size_t count) {
    std::vector<std::string> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(fresh_word(rng, taken));
    return out;
}

/// Cumulative Zipf(1) weights over ranks 1..n.
std::vector<double> zipf_cdf(std::size_t n) {
    std::vector<double> cdf(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += 1.0 / static_cast<double>(i + 1);
        cdf[i] = acc;
    }
    for (double& c : cdf) c /= acc;
    return cdf;
}

}  // namespace

Lexicon reference_lexicon(std::uint64_t reference_seed, const DomainSpec& spec) {
    Rng rng(derive_seed(reference_seed, "lexicon"));
    std::set<std::string> taken;
    Lexicon lex;
    lex.neutral = fresh_words(rng, taken, spec.vocab);
    lex.positive = fresh_words(rng, taken, spec.n_sentiment_words);
    lex.negative = fresh_words(rng, taken, spec.n_sentiment_words);
    return lex;
}

Corpus generate_domain(const Lexicon& reference, const DomainSpec& spec, std::string name) {
    spec.validate();
    if (reference.neutral.size() != spec.vocab || reference.positive.size() != spec.n_sentiment_words ||
        reference.negative.size() != spec.n_sentiment_words) {
        throw Error("synthgen: lexicon does not match the domain spec sizes");
    }

    // Swap a shift-share of each polarity's words for domain-specific ones.
    std::set<std::string> taken(reference.neutral.begin(), reference.neutral.end());
    taken.insert(reference.positive.begin(), reference.positive.end());
    taken.insert(reference.negative.begin(), reference.negative.end());
    Rng word_rng(derive_seed(spec.seed, "domain-words"));
    const auto replaced = static_cast<std::size_t>(std::lround(spec.shift * static_cast<double>(spec.n_sentiment_words)));
    std::array<std::vector<std::string>, 2> sentiment{reference.negative, reference.positive};
    for (int polarity : {1, 0}) {
        auto& words = sentiment[static_cast<std::size_t>(polarity)];
        const auto which = choose_indices(derive_seed(spec.seed, "replace", polarity ? "pos" : "neg"),
                                          words.size(), replaced);
        for (auto i : which) words[i] = fresh_word(word_rng, taken);
    }

    const auto cdf = zipf_cdf(spec.vocab);
    Rng rng(derive_seed(spec.seed, "documents"));
    Corpus corpus;
    corpus.name = std::move(name);
    corpus.provenance = "synthgen seed " + std::to_string(spec.seed);
    corpus.documents.reserve(spec.n_docs);
    for (std::size_t d = 0; d < spec.n_docs; ++d) {
        const int label = static_cast<int>(d % 2);
        const auto& lexicon = sentiment[static_cast<std::size_t>(label)];
        const std::size_t len = spec.doc_len_min + rng.below(spec.doc_len_max - spec.doc_len_min + 1);
        Document doc;
        doc.id = d;
        doc.tokens.reserve(len);
        for (std::size_t t = 0; t < len; ++t) {
            if (rng.bernoulli(spec.sentiment_rate)) {
                doc.tokens.push_back(lexicon[rng.below(lexicon.size())]);
            } else {
                const auto it = std::upper_bound(cdf.begin(), cdf.end(), rng.uniform());
                const auto rank = std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), spec.vocab - 1);
                doc.tokens.push_back(reference.neutral[rank]);
            }
        }
        doc.label = rng.bernoulli(spec.noise) ? 1 - label : label;
        corpus.documents.push_back(std::move(doc));
    }
    return corpus;
}

SyntheticFamily generate_family(std::uint64_t reference_seed, std::span<const double> shifts,
                                const DomainSpec& tmpl, const std::string& name_prefix) {
    if (shifts.empty()) throw Error("synthgen: shifts must be non-empty");
    for (double s : shifts) {
        DomainSpec probe = tmpl;
        probe.shift = s;
        probe.validate();
    }

    SyntheticFamily family;
    const Lexicon lex = reference_lexicon(reference_seed, tmpl);
    nlohmann::json domains = nlohmann::json::array();
    for (std::size_t i = 0; i < shifts.size(); ++i) {
        DomainSpec spec = tmpl;
        spec.shift = shifts[i];
        spec.seed = derive_seed(tmpl.seed, "domain", std::to_string(i));
        const std::string name = name_prefix + std::to_string(i);
        family.corpora.push_back(generate_domain(lex, spec, name));
        family.specs.push_back(spec);
        domains.push_back({{"name", name}, {"seed", spec.seed}, {"shift", spec.shift}});
    }
    family.sidecar = {{"reference_seed", reference_seed},
                      {"template",
                       {{"seed", tmpl.seed},
                        {"n_docs", tmpl.n_docs},
                        {"doc_len_min", tmpl.doc_len_min},
                        {"doc_len_max", tmpl.doc_len_max},
                        {"vocab", tmpl.vocab},
                        {"n_sentiment_words", tmpl.n_sentiment_words},
                        {"noise", tmpl.noise},
                        {"sentiment_rate", tmpl.sentiment_rate}}},
                      {"name_prefix", name_prefix},
                      {"domains", domains}};
    return family;
}

}  // namespace cmek
