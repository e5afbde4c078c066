#include <gtest/gtest.h>

#include <cmath>

#include "cmek/error.hpp"
#include "cmek/model.hpp"
#include "support/fixtures.hpp"
#include "support/temp_dir.hpp"

using namespace cmek;
using namespace cmek::testing;

namespace {

PipelineConfig small_pipeline() {
    PipelineConfig cfg;
    cfg.top_k = 200;
    cfg.fold_count = 3;
    return cfg;
}

std::vector<Corpus> three_candidates() {
    return {separable_corpus(1, 60, 0.3, "a", "A"), separable_corpus(2, 60, 0.3, "a", "B"),
            separable_corpus(3, 60, 0.3, "b", "C")};
}

PredictorWeights weights_of(std::array<double, kFeatureCount> beta) {
    PredictorWeights w;
    w.beta = beta;
    return w;
}

}  // namespace

TEST(Features, SelfPairHasZeroDistancesAndUnitConstant) {
    const Corpus c = load_corpus(data_path("toy_books.jsonl"), "books");
    PipelineConfig cfg;
    cfg.fold_count = 2;
    cfg.train.min_count = 1;
    const auto f = assemble_features(c, c, cfg);
    EXPECT_EQ(f.values[0], 0.0);
    EXPECT_LE(f.values[1], 1e-9);
    EXPECT_EQ(f.values[2], 0.0);
    EXPECT_EQ(f.values[3], 0.0);
    EXPECT_EQ(f.values[4], inner_error(c, cfg.train_for("books"), 2).error);
    EXPECT_EQ(f.values[5], 1.0);
}

TEST(Features, ToyPairVector) {
    const Corpus books = load_corpus(data_path("toy_books.jsonl"), "books");
    const Corpus kitchen = load_corpus(data_path("toy_kitchen.jsonl"), "kitchen");
    PipelineConfig cfg;
    cfg.fold_count = 2;
    cfg.train.min_count = 1;
    const auto f = assemble_features(books, kitchen, cfg);
    const auto d = distance_vector(books, kitchen, cfg.distance, cfg.top_k, cfg.pair_seed("books", "kitchen"));
    EXPECT_EQ(f.values[0], d.chi2);
    EXPECT_EQ(f.values[1], d.mmd);
    EXPECT_EQ(f.values[2], d.emd);
    EXPECT_EQ(f.values[3], d.kld);
    EXPECT_EQ(f.values[5], 1.0);
    EXPECT_EQ(f.source_name, "books");
    EXPECT_EQ(f.target_name, "kitchen");
    // Recorded once.
    const std::array<double, 6> pinned{0.0104994519361620, 0.237075771093612, 0.758169934640521,
                                       4.52296678494155, 0.65, 1.0};
    for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(f.values[i], pinned[i], 1e-9) << i;
}

TEST(Features, TargetLabelsAreNeverRead) {
    const auto c = three_candidates();
    const auto cfg = small_pipeline();
    const auto base = assemble_features(c[0], c[1], cfg);
    for (const Corpus& t : {strip_labels(c[1]), flip_labels(c[1])}) {
        const auto f = assemble_features(c[0], t, cfg);
        EXPECT_EQ(f.values, base.values);
    }
}

TEST(LooTrainingSet, ThreeCandidatesGiveSixPairs) {
    const auto c = three_candidates();
    const auto pairs = build_loo_training_set(c, small_pipeline());
    ASSERT_EQ(pairs.size(), 6u);
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& p : pairs) {
        EXPECT_NE(p.features.source_name, p.features.target_name);
        seen.emplace(p.features.source_name, p.features.target_name);
        EXPECT_GE(p.true_error, 0.0);
        EXPECT_LE(p.true_error, 1.0);
    }
    EXPECT_EQ(seen.size(), 6u);
    const auto& ab = pairs[0];
    EXPECT_EQ(ab.features.source_name, "A");
    EXPECT_EQ(ab.features.target_name, "B");
    EXPECT_EQ(ab.true_error, cross_error(c[0], c[1], small_pipeline().train_for("A")).error);
}

TEST(LooTrainingSet, TooFewCandidates) {
    auto c = three_candidates();
    c.pop_back();
    try {
        build_loo_training_set(c, small_pipeline());
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("insufficient candidates for LOO fit"), std::string::npos);
    }
}

TEST(FitWeights, ExactSyntheticPairs) {
    Rng rng(4);
    const std::array<double, 6> truth{0.1, 0.5, 1.0, 0.0, 0.0, 0.1};
    std::vector<TrainingPair> pairs;
    for (int i = 0; i < 30; ++i) {
        TrainingPair p;
        p.features.values = {rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform(), 1.0};
        for (int j = 0; j < 6; ++j) p.true_error += truth[j] * p.features.values[j];
        pairs.push_back(p);
    }
    const auto w = fit_weights(pairs);
    EXPECT_LE(w.objective, 1e-6);
    EXPECT_EQ(w.n_pairs, 30u);
    for (const auto& p : pairs) EXPECT_NEAR(predict(w, p.features), p.true_error, 1e-6);
}

TEST(FitWeights, StandardizedFitPredictsInOriginalUnits) {
    Rng rng(5);
    std::vector<TrainingPair> pairs;
    for (int i = 0; i < 30; ++i) {
        TrainingPair p;
        p.features.values = {rng.uniform() * 100, rng.uniform(), rng.uniform() * 0.01, rng.uniform(), rng.uniform(), 1.0};
        p.true_error = 0.002 * p.features.values[0] + 3 * p.features.values[2] + 0.05;
        pairs.push_back(p);
    }
    const auto w = fit_weights(pairs, FitOptions{true});
    EXPECT_TRUE(w.standardized);
    for (const auto& p : pairs) EXPECT_NEAR(predict(w, p.features), p.true_error, 1e-6);
}

TEST(Predict, HandValues) {
    const std::array<double, 6> s{0.4, 0.2, 0.7, 1.5, 0.1, 1.0};
    EXPECT_EQ(predict(weights_of({0, 0, 0, 0, 0, 0}), s), 0.0);
    EXPECT_DOUBLE_EQ(predict(weights_of({0, 0, 0, 0, 0, 0.3}), s), 0.3);
    const auto fitted = weights_of({0.13, 0.52, 1.02, 0.00, 0.00, 0.11});
    EXPECT_NEAR(predict(fitted, std::array<double, 6>{0, 0, 0, 0, 0.2, 1}), 0.11, 1e-15);
}

TEST(Rank, ArgminAndTieBreak) {
    const std::vector<RankedCandidate> scored{{"A", 0.3}, {"B", 0.1}, {"C", 0.2}};
    const auto top = rank_candidates(scored, 1);
    ASSERT_EQ(top.size(), 1u);
    EXPECT_EQ(top[0].name, "B");
    const auto tie = rank_candidates({{"C", 0.2}, {"A", 0.2}, {"B", 0.5}}, 3);
    EXPECT_EQ(tie[0].name, "A");
    EXPECT_EQ(tie[1].name, "C");
    EXPECT_EQ(tie[2].name, "B");
    EXPECT_THROW(rank_candidates(scored, 0), Error);
    EXPECT_THROW(rank_candidates(scored, 4), Error);
}

TEST(Select, RanksEveryCandidateWithoutTargetLabels) {
    const auto c = three_candidates();
    const auto cfg = small_pipeline();
    const auto w = weights_of({0, 0, 1, 0, 0, 0});
    const Corpus target = separable_corpus(9, 60, 0.3, "a", "T");
    const auto ranked = select(w, c, target, 3, cfg);
    ASSERT_EQ(ranked.size(), 3u);
    EXPECT_EQ(ranked.back().name, "C");
    const auto unlabeled = select(w, c, strip_labels(target), 3, cfg);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(ranked[i].name, unlabeled[i].name);
        EXPECT_EQ(ranked[i].predicted_error, unlabeled[i].predicted_error);
    }
    EXPECT_THROW(select(w, c, target, 4, cfg), Error);
}

TEST(Union, NamesIdsAndOrderInvariance) {
    const Corpus a = separable_corpus(10, 10, 0.5, "a", "A");
    const Corpus b = separable_corpus(11, 10, 0.5, "b", "B");
    const Corpus one = union_corpus(std::vector<Corpus>{a});
    EXPECT_EQ(one.size(), 10u);
    EXPECT_EQ(one.name, "A");
    const Corpus ab = union_corpus(std::vector<Corpus>{a, b});
    EXPECT_EQ(ab.name, "A+B");
    ASSERT_EQ(ab.size(), 20u);
    for (std::size_t i = 0; i < 20; ++i) EXPECT_EQ(ab.documents[i].id, i);

    const Corpus big_a = separable_corpus(12, 60, 0.3, "a", "A");
    const Corpus big_b = separable_corpus(13, 60, 0.3, "b", "B");
    const Hypothesis h1 = train(union_corpus(std::vector<Corpus>{big_a, big_b}), TrainConfig{});
    const Hypothesis h2 = train(union_corpus(std::vector<Corpus>{big_b, big_a}), TrainConfig{});
    EXPECT_EQ(h1.vocab.terms, h2.vocab.terms);
    EXPECT_EQ(h1.weights, h2.weights);
    EXPECT_EQ(h1.bias, h2.bias);
}

TEST(WeightsJson, RoundTrip) {
    PredictorWeights w = weights_of({0.13, 0.52, 1.02, 0, 0, 0.11});
    w.objective = 1.5;
    w.n_pairs = 30;
    w.non_unique = true;
    const auto j = weights_to_json(w);
    EXPECT_EQ(j.at("feature_order").size(), 6u);
    const auto back = weights_from_json(nlohmann::json::parse(j.dump()));
    EXPECT_EQ(back.beta, w.beta);
    EXPECT_EQ(back.n_pairs, 30u);
    EXPECT_TRUE(back.non_unique);
    auto bad = j;
    bad["beta"][0] = -1.0;
    EXPECT_THROW(weights_from_json(bad), Error);
}
