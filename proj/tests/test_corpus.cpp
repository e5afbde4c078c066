#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "cmek/corpus.hpp"
#include "cmek/error.hpp"
#include "cmek/rng.hpp"
#include "support/temp_dir.hpp"

using namespace cmek;
using cmek::testing::TempDir;
using cmek::testing::write_text;

namespace {

std::string join(const std::vector<std::string>& tokens) {
    std::string s;
    for (std::size_t i = 0; i < tokens.size(); ++i) s += (i ? " " : "") + tokens[i];
    return s;
}

Corpus labeled(std::size_t positives, std::size_t negatives) {
    std::vector<std::pair<std::string, std::optional<int>>> rows;
    for (std::size_t i = 0; i < positives; ++i) rows.emplace_back("pos " + std::to_string(i), 1);
    for (std::size_t i = 0; i < negatives; ++i) rows.emplace_back("neg " + std::to_string(i), 0);
    return make_corpus("c", rows);
}

}  // namespace

TEST(Preprocess, LowercasesAndStripsPunctuation) {
    EXPECT_EQ(preprocess("The CAT makes me Happy."),
              (std::vector<std::string>{"the", "cat", "makes", "me", "happy"}));
    EXPECT_TRUE(preprocess("").empty());
    EXPECT_EQ(preprocess("don't stop!!"), (std::vector<std::string>{"dont", "stop"}));
}

TEST(Preprocess, PunctuationOnlyTokensVanish) {
    EXPECT_EQ(preprocess("a -- b ... c"), (std::vector<std::string>{"a", "b", "c"}));
    EXPECT_EQ(preprocess("well-known\tfact\n"), (std::vector<std::string>{"wellknown", "fact"}));
}

TEST(Preprocess, StripSetIsExactlyAsciiPunctuation) {
    const std::string all = "!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~";
    EXPECT_EQ(all.size(), 32u);
    for (char ch : all) EXPECT_TRUE(is_punctuation(ch)) << ch;
    for (char ch = '0'; ch <= '9'; ++ch) EXPECT_FALSE(is_punctuation(ch));
    EXPECT_TRUE(preprocess(all).empty());
}

TEST(Preprocess, NonAsciiBytesKeptVerbatim) {
    EXPECT_EQ(preprocess("Caf\xc3\x89 \xc3\xa9t\xc3\xa9!"),
              (std::vector<std::string>{"caf\xc3\x89", "\xc3\xa9t\xc3\xa9"}));
}

TEST(Preprocess, IsIdempotentOnRandomText) {
    Rng rng(3);
    const std::string alphabet = "aBcD eF!?.,'-\t\nxyZ";
    for (int trial = 0; trial < 500; ++trial) {
        std::string text;
        const auto len = rng.below(40);
        for (std::uint64_t i = 0; i < len; ++i) text.push_back(alphabet[rng.below(alphabet.size())]);
        const auto once = preprocess(text);
        EXPECT_EQ(preprocess(join(once)), once) << text;
        for (const auto& t : once) EXPECT_FALSE(t.empty());
    }
}

TEST(LoadCorpus, ReadsDocumentsInFileOrder) {
    TempDir dir;
    write_text(dir / "c.jsonl", "{\"text\":\"good\",\"label\":1}\n{\"text\":\"bad\",\"label\":0}\n");
    const Corpus c = load_corpus(dir / "c.jsonl", "c");
    ASSERT_EQ(c.size(), 2u);
    EXPECT_EQ(c.documents[0].id, 0u);
    EXPECT_EQ(c.documents[1].id, 1u);
    EXPECT_EQ(c.documents[0].tokens, std::vector<std::string>{"good"});
    EXPECT_EQ(*c.documents[1].label, 0);
    EXPECT_EQ(c.name, "c");
}

TEST(LoadCorpus, ErrorPaths) {
    TempDir dir;
    write_text(dir / "bad_label.jsonl", "{\"text\":\"x\",\"label\":2}\n");
    try {
        load_corpus(dir / "bad_label.jsonl", "x");
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("invalid label at line 1"), std::string::npos) << e.what();
    }

    write_text(dir / "empty.jsonl", "");
    try {
        load_corpus(dir / "empty.jsonl", "x");
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("empty corpus"), std::string::npos);
    }

    write_text(dir / "broken.jsonl", "{\"text\":\"ok\",\"label\":1}\n{not json\n");
    try {
        load_corpus(dir / "broken.jsonl", "x");
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }

    write_text(dir / "unlabeled.jsonl", "{\"text\":\"ok\"}\n");
    EXPECT_THROW(load_corpus(dir / "unlabeled.jsonl", "x"), Error);
    const Corpus t = load_corpus(dir / "unlabeled.jsonl", "x", LabelPolicy::optional);
    EXPECT_FALSE(t.documents[0].label.has_value());
    EXPECT_THROW(load_corpus(dir / "missing.jsonl", "x"), Error);
}

TEST(LoadCorpus, SaveRoundTripPreservesCorpus) {
    TempDir dir;
    const Corpus original = make_corpus("rt", {{"Hello, World!", 1}, {"another   line here", 0}, {"", 1}});
    save_corpus(original, dir / "rt.jsonl");
    const Corpus again = load_corpus(dir / "rt.jsonl", "rt");
    ASSERT_EQ(again.size(), original.size());
    for (std::size_t i = 0; i < original.size(); ++i) {
        EXPECT_EQ(again.documents[i].tokens, original.documents[i].tokens);
        EXPECT_EQ(again.documents[i].label, original.documents[i].label);
        EXPECT_EQ(again.documents[i].id, original.documents[i].id);
    }
}

TEST(StratifiedFolds, TenDocumentsTwoFolds) {
    const Corpus c = labeled(5, 5);
    const auto folds = stratified_folds(c, {2, 7});
    ASSERT_EQ(folds.size(), 2u);
    for (const auto& f : folds) {
        EXPECT_EQ(f.test.size(), 5u);
        std::size_t pos = 0;
        for (auto i : f.test) pos += *c.documents[i].label == 1;
        EXPECT_TRUE(pos == 2 || pos == 3);
        EXPECT_EQ(f.train.size(), 5u);
    }
    const auto again = stratified_folds(c, {2, 7});
    for (std::size_t k = 0; k < 2; ++k) EXPECT_EQ(folds[k].test, again[k].test);
}

TEST(StratifiedFolds, SinglePositiveLandsInExactlyOneFold) {
    const Corpus c = labeled(1, 3);
    const auto folds = stratified_folds(c, {2, 99});
    int holding = 0;
    for (const auto& f : folds) {
        EXPECT_EQ(f.test.size(), 2u);
        holding += std::count(f.test.begin(), f.test.end(), std::size_t{0}) > 0;
    }
    EXPECT_EQ(holding, 1);
}

TEST(StratifiedFolds, PartitionAndBalanceProperties) {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t pos = 2 + rng.below(30), neg = 2 + rng.below(30);
        const Corpus c = labeled(pos, neg);
        const std::size_t k = 2 + rng.below(std::min(pos, neg) - 1);
        const auto folds = stratified_folds(c, {k, rng.next()});
        std::vector<int> seen(c.size(), 0);
        const double global = static_cast<double>(pos) / static_cast<double>(pos + neg);
        for (const auto& f : folds) {
            std::size_t fp = 0;
            for (auto i : f.test) {
                ++seen[i];
                fp += *c.documents[i].label == 1;
            }
            EXPECT_EQ(f.test.size() + f.train.size(), c.size());
            EXPECT_LE(std::abs(static_cast<double>(fp) - global * static_cast<double>(f.test.size())), 1.0 + 1e-9);
        }
        for (int s : seen) EXPECT_EQ(s, 1);
    }
}

TEST(StratifiedFolds, InvariantToDocumentOrder) {
    Corpus c = labeled(6, 7);
    const auto folds = stratified_folds(c, {3, 42});
    auto test_ids = [](const Corpus& corpus, const std::vector<Fold>& fs) {
        std::vector<std::set<std::size_t>> ids;
        for (const auto& f : fs) {
            std::set<std::size_t> s;
            for (auto i : f.test) s.insert(corpus.documents[i].id);
            ids.push_back(s);
        }
        return ids;
    };
    Corpus shuffled = c;
    std::reverse(shuffled.documents.begin(), shuffled.documents.end());
    EXPECT_EQ(test_ids(c, folds), test_ids(shuffled, stratified_folds(shuffled, {3, 42})));
}

TEST(StratifiedFolds, Errors) {
    EXPECT_THROW(stratified_folds(labeled(2, 2), {1, 0}), Error);
    EXPECT_THROW(stratified_folds(labeled(2, 2), {5, 0}), Error);
    EXPECT_THROW(stratified_folds(strip_labels(labeled(2, 2)), {2, 0}), Error);
}

TEST(Manifest, ResolvesRelativePathsAndRoles) {
    TempDir dir;
    write_text(dir / "m.json",
               R"([{"name":"a","path":"a.jsonl","role":"candidate"},{"name":"t","path":"/abs/t.jsonl","role":"target"}])");
    const auto m = load_manifest(dir / "m.json");
    ASSERT_EQ(m.size(), 2u);
    EXPECT_EQ(m[0].path, dir.path() / "a.jsonl");
    EXPECT_EQ(m[1].role, CorpusRole::target);
    EXPECT_EQ(m[1].path, std::filesystem::path("/abs/t.jsonl"));

    write_text(dir / "dup.json", R"([{"name":"a","path":"a"},{"name":"a","path":"b"}])");
    EXPECT_THROW(load_manifest(dir / "dup.json"), Error);
    write_text(dir / "role.json", R"([{"name":"a","path":"a","role":"source"}])");
    EXPECT_THROW(load_manifest(dir / "role.json"), Error);
}
