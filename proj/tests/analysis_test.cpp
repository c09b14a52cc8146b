#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "langinc/analysis.hpp"
#include "langinc/error.hpp"
#include "langinc/random.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace langinc {
namespace {

struct NamedEntity {
  EntityId id;
  std::vector<float> v;
};

/// Hand-built model; entities are sorted here so callers may list them freely.
EmbeddingModel make_model(std::uint32_t dim, std::vector<NamedEntity> entities) {
  std::sort(entities.begin(), entities.end(),
            [](const NamedEntity& a, const NamedEntity& b) { return a.id < b.id; });
  EmbeddingModel model;
  model.dim = dim;
  model.config.dim = dim;
  for (const auto& e : entities) {
    model.entities.push_back(e.id);
    model.entity_vectors.insert(model.entity_vectors.end(), e.v.begin(), e.v.end());
  }
  return model;
}

std::vector<float> at_angle(double degrees) {
  const double radians = degrees * std::numbers::pi / 180.0;
  return {static_cast<float>(std::cos(radians)), static_cast<float>(std::sin(radians))};
}

EntityId author(const std::string& key) { return {EntityKind::Author, key}; }
EntityId language(const std::string& key) { return {EntityKind::Language, key}; }

EmbeddingModel angles_model() {
  return make_model(2, {{language("la"), at_angle(0)},
                        {language("lb"), at_angle(30)},
                        {language("lc"), at_angle(90)},
                        {author("x"), at_angle(20)},
                        {author("y"), at_angle(75)},
                        {author("z"), at_angle(200)}});
}

TEST(CosineDistance, Examples) {
  const std::vector<double> a{1, 2, 3};
  const std::vector<double> neg{-1, -2, -3};
  const std::vector<double> e1{1, 0}, e2{0, 1};
  EXPECT_NEAR(cosine_distance(std::span<const double>(a), std::span<const double>(a)), 0.0, 1e-12);
  EXPECT_NEAR(cosine_distance(std::span<const double>(e1), std::span<const double>(e2)), 1.0, 1e-12);
  EXPECT_NEAR(cosine_distance(std::span<const double>(a), std::span<const double>(neg)), 2.0, 1e-12);
}

TEST(CosineDistance, RejectsDegenerateInput) {
  const std::vector<float> zero{0, 0}, one{1, 0}, three{1, 2, 3};
  const std::vector<float> nan{std::nanf(""), 1};
  EXPECT_THROW(cosine_distance(std::span<const float>(zero), std::span<const float>(one)), DataError);
  EXPECT_THROW(cosine_distance(std::span<const float>(one), std::span<const float>(three)), DataError);
  EXPECT_THROW(cosine_distance(std::span<const float>(nan), std::span<const float>(one)), DataError);
}

TEST(CosineDistance, ScaleInvariantAndMatchesOracle) {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> a(5), b(5);
    for (auto& x : a) x = rng.normal();
    for (auto& x : b) x = rng.normal();
    const double d = cosine_distance(std::span<const double>(a), std::span<const double>(b));
    EXPECT_NEAR(d, oracle::cosine_distance(a, b), 1e-12);
    EXPECT_NEAR(cosine_distance(std::span<const double>(b), std::span<const double>(a)), d, 1e-15);
    auto scaled = a;
    const double s = rng.uniform(0.01, 100.0);
    for (auto& x : scaled) x *= s;
    EXPECT_NEAR(cosine_distance(std::span<const double>(scaled), std::span<const double>(b)), d, 1e-12);
  }
}

TEST(DistanceTable, VenueEqualToSingleLanguageIsZero) {
  const auto model = make_model(3, {{{EntityKind::Venue, "ACL"}, {0.2f, -1.0f, 0.5f}},
                                    {language("en"), {0.2f, -1.0f, 0.5f}},
                                    {language("fr"), {1.0f, 0.0f, 0.0f}}});
  const auto table = class_distance_table(model, {{"en", 5}, {"fr", 2}, {"unused", 1}});
  EXPECT_EQ(table.venues, (std::vector<std::string>{"ACL"}));
  EXPECT_NEAR(table.values.at("ACL").at(5), 0.0, 1e-7);
  EXPECT_GT(table.values.at("ACL").at(2), 0.1);
  EXPECT_FALSE(table.values.at("ACL").contains(1));
}

TEST(DistanceTable, UsesMeanOfClassVectors) {
  const auto model = make_model(2, {{{EntityKind::Venue, "V"}, {1.0f, 1.0f}},
                                    {language("a"), {1.0f, 0.0f}},
                                    {language("b"), {0.0f, 1.0f}}});
  const auto table = class_distance_table(model, {{"a", 3}, {"b", 3}});
  EXPECT_NEAR(table.values.at("V").at(3), 0.0, 1e-7);
}

TEST(LalMrr, HandCases) {
  const auto model = angles_model();
  const ClassMap classes{{"la", 0}, {"lb", 1}, {"lc", 1}};
  const auto k2 = lal_mrr(model, classes, {2}, 2);
  // la: nearest authors x, y; la is second for x, absent for y.
  EXPECT_DOUBLE_EQ(k2.per_language.at("la").at(2), 0.25);
  EXPECT_DOUBLE_EQ(k2.per_class.at(0).at(2), 0.25);
  const auto k1 = lal_mrr(model, classes, {1}, 2);
  // lb: nearest author x, whose nearest language is lb.
  EXPECT_DOUBLE_EQ(k1.per_language.at("lb").at(1), 1.0);
}

TEST(LalMrr, ShortfallIsAnError) {
  const auto model = angles_model();
  EXPECT_THROW(lal_mrr(model, {}, {4}, 2), DataError);
  EXPECT_THROW(lal_mrr(model, {}, {2}, 4), DataError);
}

TEST(LalMrr, MatchesBruteForceOnSmallModels) {
  Rng rng(37);
  for (int trial = 0; trial < 60; ++trial) {
    const std::uint32_t dim = 2 + static_cast<std::uint32_t>(rng.index(4));
    const std::size_t n_authors = 1 + rng.index(10);
    const std::size_t n_languages = 1 + rng.index(20 - n_authors);
    std::vector<NamedEntity> entities;
    std::vector<oracle::NamedVector> authors, languages;
    ClassMap classes;
    auto random_float_vector = [&] {
      std::vector<float> v(dim);
      for (auto& x : v) x = static_cast<float>(rng.normal());
      return v;
    };
    for (std::size_t i = 0; i < n_authors; ++i) {
      const std::string key = "a" + std::to_string(i);
      auto v = random_float_vector();
      authors.push_back({key, std::vector<double>(v.begin(), v.end())});
      entities.push_back({author(key), v});
    }
    for (std::size_t i = 0; i < n_languages; ++i) {
      const std::string key = "l" + std::to_string(i);
      auto v = random_float_vector();
      languages.push_back({key, std::vector<double>(v.begin(), v.end())});
      entities.push_back({language(key), v});
      classes[key] = static_cast<int>(rng.index(6));
    }
    const auto model = make_model(dim, entities);
    const std::size_t k = 1 + rng.index(n_authors);
    const std::size_t m = 1 + rng.index(n_languages);
    const auto table = lal_mrr(model, classes, {k}, m);
    for (const auto& l : languages) {
      const double expected = oracle::lal_mrr_one(l, authors, languages, k, m);
      EXPECT_DOUBLE_EQ(table.per_language.at(l.key).at(k), expected) << l.key;
      EXPECT_GE(expected, 0.0);
      EXPECT_LE(expected, 1.0);
    }
  }
}

TEST(LalMrr, RescalingVectorsChangesNothing) {
  auto model = angles_model();
  const auto before = lal_mrr(model, {{"la", 0}, {"lb", 1}, {"lc", 2}}, {1, 2, 3}, 3);
  for (std::size_t row = 0; row < model.entity_count(); ++row) {
    const float s = 0.5f + static_cast<float>(row);
    for (std::size_t i = 0; i < model.dim; ++i) model.entity_vectors[row * model.dim + i] *= s;
  }
  const auto after = lal_mrr(model, {{"la", 0}, {"lb", 1}, {"lc", 2}}, {1, 2, 3}, 3);
  EXPECT_EQ(before.per_language, after.per_language);
}

TEST(PaperVector, MeanOverTokenMultiset) {
  EmbeddingModel model = make_model(2, {});
  model.vocab.words = {"a", "b"};
  model.vocab.counts = {5, 5};
  model.vocab.rebuild_index();
  model.word_vectors = {1.0f, 2.0f, 4.0f, -1.0f};

  auto paper = testing::make_paper("p", "a b", "V", 2000, {}, {});
  auto result = paper_vector(model, paper);
  EXPECT_FALSE(result.oov);
  EXPECT_DOUBLE_EQ(result.values[0], 2.5);
  EXPECT_DOUBLE_EQ(result.values[1], 0.5);

  paper.title = "a a b zzz";
  result = paper_vector(model, paper);
  EXPECT_DOUBLE_EQ(result.values[0], 2.0);
  EXPECT_DOUBLE_EQ(result.values[1], 1.0);

  paper.title = "zzz qqq";
  result = paper_vector(model, paper);
  EXPECT_TRUE(result.oov);
  EXPECT_EQ(result.values, (std::vector<double>{0.0, 0.0}));
}

TEST(Ols, RecoversExactLinearModel) {
  Rng rng(41);
  const std::vector<double> truth{2.0, -3.0, 0.5};
  std::vector<std::vector<double>> features;
  std::vector<double> targets;
  for (int i = 0; i < 50; ++i) {
    std::vector<double> row(3);
    for (auto& x : row) x = rng.normal();
    features.push_back(row);
    targets.push_back(7.0 + truth[0] * row[0] + truth[1] * row[1] + truth[2] * row[2]);
  }
  const auto fit = fit_ols(features, targets);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(fit.coefficients[j], truth[j], 1e-6 * std::abs(truth[j]));
  EXPECT_NEAR(fit.intercept, 7.0, 1e-6);

  std::vector<double> predicted;
  for (const auto& row : features) predicted.push_back(fit.predict(row));
  EXPECT_NEAR(*r2_score(targets, predicted), 1.0, 1e-9);
  EXPECT_LE(mean_absolute_error(targets, predicted), 1e-6);
}

TEST(Ols, InterceptOnlyHasZeroR2) {
  const std::vector<double> targets{-2.0, -1.0, 0.0, 1.0, 2.0};
  const std::vector<std::vector<double>> features(5, std::vector<double>{0.0});
  const auto fit = fit_ols(features, targets);
  std::vector<double> predicted;
  for (const auto& row : features) predicted.push_back(fit.predict(row));
  EXPECT_NEAR(*r2_score(targets, predicted), 0.0, 1e-9);
  EXPECT_FALSE(r2_score(std::vector<double>{3.0, 3.0}, std::vector<double>{3.0, 2.0}).has_value());
}

TEST(YearRegression, SingleYearLeavesR2Undefined) {
  synth::PlantSpec spec;
  spec.first_year = 2015;
  spec.last_year = 2015;
  const Corpus corpus = testing::planted_corpus(spec);
  TrainConfig cfg;
  cfg.dim = 4;
  cfg.epochs = 1;
  const auto model = train(corpus, cfg);
  const auto eval = year_regression_eval(model, corpus, 42, 0.8);
  EXPECT_FALSE(eval.r2.has_value());
  EXPECT_GE(eval.mae, 0.0);
  EXPECT_EQ(eval.train_size + eval.test_size + eval.oov_excluded, corpus.size());
  EXPECT_EQ(eval.test_size, corpus.size() - static_cast<std::size_t>(0.8 * corpus.size()));
}

std::vector<double> three_clusters(std::size_t per_cluster, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> points;
  const double centers[3][3] = {{0, 0, 0}, {10, 0, 0}, {0, 10, 0}};
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < per_cluster; ++i) {
      for (std::size_t d = 0; d < 3; ++d) points.push_back(centers[c][d] + rng.normal());
    }
  }
  return points;
}

TEST(Tsne, ShapeDeterminismAndClusters) {
  const auto points = three_clusters(15, 3);
  TsneConfig cfg;
  cfg.iterations = 500;
  const auto a = tsne(points, 3, cfg);
  const auto b = tsne(points, 3, cfg);
  ASSERT_EQ(a.coords.size(), 90u);
  EXPECT_EQ(a.coords, b.coords);
  for (const double x : a.coords) EXPECT_TRUE(std::isfinite(x));
  EXPECT_LT(a.final_kl, a.initial_kl);
  EXPECT_NEAR(a.effective_perplexity, 44.0 / 3.0, 1e-12);

  std::size_t agree = 0;
  for (std::size_t i = 0; i < 45; ++i) {
    std::size_t best = i == 0 ? 1 : 0;
    double best_d = INFINITY;
    for (std::size_t j = 0; j < 45; ++j) {
      if (j == i) continue;
      const double dx = a.coords[2 * i] - a.coords[2 * j];
      const double dy = a.coords[2 * i + 1] - a.coords[2 * j + 1];
      if (dx * dx + dy * dy < best_d) {
        best_d = dx * dx + dy * dy;
        best = j;
      }
    }
    agree += best / 15 == i / 15 ? 1 : 0;
  }
  EXPECT_GE(agree, 41u);
}

TEST(Tsne, IdenticalPointsStayTogether) {
  auto points = three_clusters(6, 5);
  // Duplicate point 0 over point 1.
  std::copy(points.begin(), points.begin() + 3, points.begin() + 3);
  TsneConfig cfg;
  cfg.iterations = 400;
  const auto result = tsne(points, 3, cfg);
  auto dist = [&](std::size_t i, std::size_t j) {
    return std::hypot(result.coords[2 * i] - result.coords[2 * j], result.coords[2 * i + 1] - result.coords[2 * j + 1]);
  };
  for (std::size_t k = 6; k < 18; ++k) {
    EXPECT_LT(dist(0, 1), dist(0, k));
    EXPECT_LT(dist(0, 1), dist(1, k));
  }
}

TEST(Tsne, TooFewPoints) {
  const std::vector<double> points{0, 0, 1, 1, 2, 2};
  EXPECT_THROW(tsne(points, 2), DataError);
}

TEST(TsneProject, SelectsByKindAndClass) {
  const auto model = angles_model();
  EntitySelection selection;
  selection.kinds = {EntityKind::Language, EntityKind::Author};
  TsneConfig cfg;
  const auto all = tsne_project(model, selection, cfg);
  EXPECT_EQ(all.size(), 6u);
  EXPECT_EQ(all.coords.size(), 12u);
  EXPECT_LE(all.final_kl, all.initial_kl);

  selection.kinds = {EntityKind::Language};
  selection.language_classes = ClassMap{{"la", 0}, {"lb", 1}, {"lc", 1}};
  selection.classes = {1};
  EXPECT_FALSE(selection.accepts(language("la")));
  EXPECT_TRUE(selection.accepts(language("lb")));
  EXPECT_FALSE(selection.accepts(author("x")));
  EXPECT_THROW(tsne_project(model, selection, cfg), DataError);
}

}  // namespace
}  // namespace langinc
