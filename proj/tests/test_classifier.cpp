#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "cmek/classifier.hpp"
#include "cmek/error.hpp"
#include "support/fixtures.hpp"

using namespace cmek;
using namespace cmek::testing;

namespace {

Hypothesis constant_hypothesis(double bias) {
    Hypothesis h;
    h.vocab = vocabulary_from_terms({"good"}, make_corpus("v", {{"good", 1}}));
    h.idf = idf_weights(h.vocab);
    h.weights = {0.0};
    h.bias = bias;
    return h;
}

LogisticProblem random_problem(std::uint64_t seed, std::size_t rows, std::size_t dim) {
    Rng rng(seed);
    LogisticProblem p;
    p.dim = dim;
    for (std::size_t r = 0; r < rows; ++r) {
        SparseRow row;
        for (std::uint32_t c = 0; c < dim; ++c) {
            if (rng.uniform() < 0.4) {
                row.cols.push_back(c);
                row.vals.push_back(rng.uniform());
            }
        }
        p.rows.push_back(row);
        p.positives.push_back(static_cast<double>(rng.below(3)));
        p.negatives.push_back(static_cast<double>(rng.below(3)));
    }
    return p;
}

}  // namespace

TEST(Train, SeparableFixtureHasZeroTrainingError) {
    const Corpus c = separable_corpus(1);
    const Hypothesis h = train(c, TrainConfig{});
    EXPECT_TRUE(h.converged);
    EXPECT_LE(h.gradient_norm, 1e-6);
    EXPECT_EQ(holdout_error(h, c).n_misclassified, 0u);
    ASSERT_TRUE(h.vocab.find("good"));
    EXPECT_GT(h.weights[*h.vocab.find("good")], 0.0);
}

TEST(Train, HugeAlphaShrinksWeightsToMajorityBias) {
    TrainConfig cfg;
    cfg.alpha = 1e9;
    const Corpus c = separable_corpus(2);
    const Hypothesis h = train(c, cfg);
    for (double w : h.weights) EXPECT_LT(std::abs(w), 1e-7);
    EXPECT_NEAR(h.bias, std::log(0.3 / 0.7), 1e-5);
    for (const auto& d : c.documents) EXPECT_EQ(classify(h, d), 0);
}

TEST(Train, SingleClassOrUnlabeledIsAnError) {
    const Corpus one = make_corpus("one", {{"a", 1}, {"b", 1}});
    EXPECT_THROW(train(one, TrainConfig{}), Error);
    EXPECT_THROW(train(strip_labels(separable_corpus(3)), TrainConfig{}), Error);
}

TEST(Train, IsDeterministicAndOrderInvariant) {
    const Corpus c = random_label_corpus(4, 200);
    const Hypothesis a = train(c, TrainConfig{});
    const Hypothesis b = train(c, TrainConfig{});
    EXPECT_EQ(a.weights, b.weights);
    EXPECT_EQ(a.bias, b.bias);
    Corpus reversed = c;
    std::reverse(reversed.documents.begin(), reversed.documents.end());
    const Hypothesis r = train(reversed, TrainConfig{});
    EXPECT_EQ(a.weights, r.weights);
    EXPECT_EQ(a.bias, r.bias);
}

TEST(FitLogistic, DuplicatedRowsEqualDoubledAlpha) {
    const auto p = random_problem(5, 40, 6);
    auto doubled = p;
    for (auto& v : doubled.positives) v *= 2;
    for (auto& v : doubled.negatives) v *= 2;
    const auto a = fit_logistic(p, 0.7, 1000, 1e-9);
    const auto b = fit_logistic(doubled, 1.4, 1000, 1e-9);
    ASSERT_TRUE(a.converged && b.converged);
    for (std::size_t i = 0; i < p.dim; ++i) EXPECT_NEAR(a.weights[i], b.weights[i], 1e-8);
    EXPECT_NEAR(a.bias, b.bias, 1e-8);
    EXPECT_NEAR(2 * a.objective, b.objective, 1e-8);
}

TEST(FitLogistic, ObjectiveTraceIsMonotone) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto p = random_problem(seed, 60, 12);
        const auto fit = fit_logistic(p, 0.1, 1000, 1e-8, true);
        ASSERT_GE(fit.objective_trace.size(), 2u);
        for (std::size_t i = 1; i < fit.objective_trace.size(); ++i) {
            EXPECT_LE(fit.objective_trace[i], fit.objective_trace[i - 1] + 1e-12);
        }
        EXPECT_NEAR(fit.objective, logistic_objective(p, 0.1, fit.weights, fit.bias), 1e-12);
        if (fit.converged) EXPECT_LE(fit.gradient_norm, 1e-8);
    }
}

TEST(FitLogistic, GradientVanishesAtReturnedPoint) {
    const auto p = random_problem(6, 30, 5);
    const double alpha = 0.5;
    const auto fit = fit_logistic(p, alpha, 1000, 1e-9);
    // Central differences on the objective.
    const double h = 1e-6;
    for (std::size_t i = 0; i <= p.dim; ++i) {
        auto w1 = fit.weights, w2 = fit.weights;
        double b1 = fit.bias, b2 = fit.bias;
        if (i < p.dim) {
            w1[i] += h;
            w2[i] -= h;
        } else {
            b1 += h;
            b2 -= h;
        }
        const double g = (logistic_objective(p, alpha, w1, b1) - logistic_objective(p, alpha, w2, b2)) / (2 * h);
        EXPECT_NEAR(g, 0.0, 1e-5);
    }
}

TEST(Classify, ConstantHypotheses) {
    const Corpus c = separable_corpus(7, 20);
    for (const auto& d : c.documents) {
        EXPECT_EQ(classify(constant_hypothesis(-1), d), 0);
        EXPECT_EQ(classify(constant_hypothesis(1), d), 1);
    }
}

TEST(Classify, OutOfVocabularyDocumentFollowsBias) {
    Hypothesis h = constant_hypothesis(0.25);
    h.weights = {-50.0};
    const Document oov{{"zzz", "qqq"}, 1, 0};
    EXPECT_EQ(decision_value(h, oov), 0.25);
    EXPECT_EQ(classify(h, oov), 1);
    const Document hit{{"good"}, 1, 1};
    EXPECT_EQ(classify(h, hit), 0);
    h.bias = 0.0;
    EXPECT_EQ(classify(h, oov), 0);
}

TEST(InnerError, SeparableFixtureIsNearZero) {
    const auto e = inner_error(separable_corpus(8), TrainConfig{}, 10);
    EXPECT_LE(e.error, 0.05);
    EXPECT_EQ(e.n_evaluated, 200u);
    EXPECT_EQ(e.kind, ErrorKind::inner_cv);
    EXPECT_DOUBLE_EQ(e.error, static_cast<double>(e.n_misclassified) / 200.0);
}

TEST(InnerError, RandomLabelsAreNearChance) {
    const auto e = inner_error(random_label_corpus(9), TrainConfig{}, 10);
    EXPECT_GE(e.error, 0.4);
    EXPECT_LE(e.error, 0.6);
}

// A twin pair split across folds leaves its opposite-label copy in training,
// which the model fits; a pair held out together costs exactly one error.
TEST(InnerError, ContradictoryDuplicatesNeverBeatChance) {
    const Corpus c = contradictory_corpus(10);
    const auto e = inner_error(c, TrainConfig{}, 10);
    EXPECT_GE(e.error, 0.5);
    EXPECT_LE(e.error, 1.0);

    TrainConfig cfg;
    cfg.seed = 10;
    const auto folds = stratified_folds(c, {10, cfg.seed});
    for (const auto& f : folds) {
        Corpus part;
        for (auto i : f.train) part.documents.push_back(c.documents[i]);
        const Hypothesis h = train(part, cfg);
        for (auto i : f.test) {
            const std::size_t twin = i ^ 1;
            if (std::find(f.test.begin(), f.test.end(), twin) == f.test.end()) continue;
            EXPECT_NE(classify(h, c.documents[i]) == *c.documents[i].label,
                      classify(h, c.documents[twin]) == *c.documents[twin].label);
        }
    }
}

TEST(InnerError, MoreFoldsThanMinorityClassIsAnError) {
    const Corpus c = separable_corpus(11, 20, 0.2);
    EXPECT_THROW(inner_error(c, TrainConfig{}, 5), Error);
}

TEST(CrossError, SameCorpusIsTrainingError) {
    const Corpus c = random_label_corpus(12, 200);
    const auto cross = cross_error(c, c, TrainConfig{});
    EXPECT_EQ(cross.n_misclassified, holdout_error(train(c, TrainConfig{}), c).n_misclassified);
    EXPECT_EQ(cross.kind, ErrorKind::cross_domain);
}

TEST(CrossError, InvertedTargetIsAlmostAlwaysWrong) {
    const Corpus source = separable_corpus(13);
    const Corpus target = flip_labels(separable_corpus(14));
    EXPECT_GE(cross_error(source, target, TrainConfig{}).error, 0.95);
}

TEST(CrossError, DisjointVocabularyFallsBackToMajority) {
    const Corpus source = separable_corpus(15, 100, 0.3, "s");
    const Corpus target = separable_corpus(16, 50, 0.2, "t");
    Corpus stripped = target;
    for (auto& d : stripped.documents) std::erase(d.tokens, "good");
    const auto e = cross_error(source, stripped, TrainConfig{});
    EXPECT_DOUBLE_EQ(e.error, 0.2);
    EXPECT_EQ(train(source, TrainConfig{}).bias < 0, true);
}

TEST(CrossError, LabelFlipSymmetryIsExact) {
    const Corpus source = random_label_corpus(17, 150);
    const Corpus target = random_label_corpus(18, 120);
    const auto a = cross_error(source, target, TrainConfig{});
    const auto b = cross_error(flip_labels(source), flip_labels(target), TrainConfig{});
    EXPECT_EQ(a.n_misclassified, b.n_misclassified);
    const Hypothesis h = train(source, TrainConfig{});
    const Hypothesis f = train(flip_labels(source), TrainConfig{});
    for (std::size_t i = 0; i < h.weights.size(); ++i) EXPECT_EQ(h.weights[i], -f.weights[i]);
    EXPECT_EQ(h.bias, -f.bias);
}

TEST(CrossError, UnlabeledTargetIsAnError) {
    try {
        cross_error(separable_corpus(19), strip_labels(separable_corpus(20)), TrainConfig{});
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("cross_error requires labels"), std::string::npos);
    }
}

TEST(HypothesisJson, RoundTripPreservesDecisions) {
    const Corpus c = random_label_corpus(21, 100);
    const Hypothesis h = train(c, TrainConfig{});
    const Hypothesis back = hypothesis_from_json(nlohmann::json::parse(hypothesis_to_json(h).dump()));
    EXPECT_EQ(back.vocab.terms, h.vocab.terms);
    for (const auto& d : c.documents) EXPECT_EQ(decision_value(back, d), decision_value(h, d));
}

TEST(TrainConfig, Validation) {
    TrainConfig cfg;
    cfg.alpha = -1;
    EXPECT_THROW(cfg.validate(), Error);
    cfg.alpha = 1;
    cfg.tolerance = 0;
    EXPECT_THROW(cfg.validate(), Error);
}
