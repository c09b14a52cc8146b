#include <gtest/gtest.h>

#include <cmath>

#include "langinc/metrics.hpp"
#include "langinc/random.hpp"
#include "oracles.hpp"

namespace langinc {
namespace {

PaperRecord paper(const std::string& id, const std::string& venue, int year,
                  std::set<std::string> languages) {
  PaperRecord p;
  p.id = id;
  p.venue = venue;
  p.year = year;
  p.languages = std::move(languages);
  p.languages_annotated = true;
  return p;
}

Corpus three_papers() {
  return Corpus({paper("p1", "ACL", 2019, {"en"}), paper("p2", "ACL", 2019, {"en", "fr"}),
                 paper("p3", "ACL", 2019, {"en"})});
}

OccurrenceMatrix matrix_from(const std::vector<std::vector<int>>& bits) {
  OccurrenceMatrix m;
  m.venue = "V";
  m.year = 2000;
  const std::size_t cols = bits.empty() ? 0 : bits.front().size();
  for (std::size_t j = 0; j < cols; ++j) m.language_ids.push_back("l" + std::to_string(j));
  for (std::size_t i = 0; i < bits.size(); ++i) {
    m.paper_ids.push_back("p" + std::to_string(i));
    for (const int b : bits[i]) m.bits.push_back(static_cast<std::uint8_t>(b));
  }
  return m;
}

TEST(OccurrenceMatrix, TwoPapers) {
  const Corpus corpus({paper("p1", "ACL", 2019, {"en"}), paper("p2", "ACL", 2019, {"en", "fr"}),
                       paper("p3", "EMNLP", 2019, {"de"}), paper("p4", "ACL", 2018, {"de"})});
  const auto m = occurrence_matrix(corpus, "ACL", 2019);
  EXPECT_EQ(m.paper_ids, (std::vector<std::string>{"p1", "p2"}));
  EXPECT_EQ(m.language_ids, (std::vector<std::string>{"en", "fr"}));
  EXPECT_EQ(m.bits, (std::vector<std::uint8_t>{1, 0, 1, 1}));
}

TEST(OccurrenceMatrix, EmptyVenueYear) {
  const auto m = occurrence_matrix(three_papers(), "ACL", 1990);
  EXPECT_EQ(m.papers(), 0u);
  EXPECT_EQ(m.languages(), 0u);
}

TEST(OccurrenceMatrix, ColumnSumsAndExtraUniverse) {
  const auto m = occurrence_matrix(three_papers(), "ACL", 2019, {"zu"});
  EXPECT_EQ(m.language_ids, (std::vector<std::string>{"en", "fr", "zu"}));
  EXPECT_EQ(m.column_sums(), (std::vector<std::size_t>{3, 1, 0}));
  EXPECT_NEAR(occurrence_entropy(m).entropy, 0.562335, 1e-6);
}

TEST(OccurrenceEntropy, SingleLanguageIsZero) {
  EXPECT_EQ(occurrence_entropy(matrix_from({{1}})).entropy, 0.0);
  EXPECT_EQ(occurrence_entropy(matrix_from({})).entropy, 0.0);
  EXPECT_EQ(occurrence_entropy(matrix_from({{0, 0}, {0, 0}})).entropy, 0.0);
}

TEST(OccurrenceEntropy, UniformIsLogL) {
  const auto result = occurrence_entropy(matrix_from({{1, 1, 1, 1}, {1, 1, 1, 1}, {1, 1, 1, 1}}));
  EXPECT_NEAR(result.entropy, std::log(4.0), 1e-12);
  EXPECT_EQ(result.languages_mentioned, 4u);
}

TEST(OccurrenceEntropy, HandCase) {
  const double expected = oracle::entropy({{1, 0}, {1, 1}, {1, 0}});
  EXPECT_NEAR(expected, 0.562335, 1e-6);
  EXPECT_NEAR(occurrence_entropy(occurrence_matrix(three_papers(), "ACL", 2019)).entropy, expected, 1e-12);
}

TEST(OccurrenceEntropy, PermutationAndDuplicationInvariant) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t p = 1 + rng.index(8);
    const std::size_t l = 1 + rng.index(8);
    std::vector<std::vector<int>> bits(p, std::vector<int>(l));
    for (auto& row : bits) {
      for (auto& b : row) b = rng.bernoulli(0.4) ? 1 : 0;
    }
    const double base = occurrence_entropy(matrix_from(bits)).entropy;
    EXPECT_NEAR(base, oracle::entropy(bits), 1e-12);

    auto shuffled = bits;
    rng.shuffle(std::span<std::vector<int>>(shuffled));
    std::vector<std::size_t> cols(l);
    for (std::size_t j = 0; j < l; ++j) cols[j] = j;
    rng.shuffle(std::span<std::size_t>(cols));
    for (auto& row : shuffled) {
      const auto copy = row;
      for (std::size_t j = 0; j < l; ++j) row[j] = copy[cols[j]];
    }
    EXPECT_NEAR(occurrence_entropy(matrix_from(shuffled)).entropy, base, 1e-12);

    auto doubled = bits;
    doubled.insert(doubled.end(), bits.begin(), bits.end());
    EXPECT_NEAR(occurrence_entropy(matrix_from(doubled)).entropy, base, 1e-12);
  }
}

TEST(EntropySeries, OneRowPerYear) {
  const Corpus corpus({paper("a", "ACL", 1991, {"en", "fr"}), paper("b", "ACL", 1990, {"en"}),
                       paper("c", "ACL", 1990, {"en"}), paper("d", "NAACL", 1995, {"en"})});
  const auto series = entropy_series(corpus, "ACL");
  ASSERT_EQ(series.size(), 2u);
  EXPECT_EQ(series[0].year, 1990);
  EXPECT_EQ(series[1].year, 1991);
  EXPECT_EQ(series[0].entropy, 0.0);
  EXPECT_NEAR(series[1].entropy, std::log(2.0), 1e-12);
  EXPECT_TRUE(entropy_series(corpus, "XYZ").empty());
}

TEST(MentionRanks, CompetitionRankingAndSharedZeroRank) {
  const Corpus corpus({paper("1", "V", 2000, {"a", "b"}), paper("2", "V", 2000, {"a", "c"}),
                       paper("3", "V", 2000, {"a"}), paper("4", "W", 2000, {"d", "d2"})});
  const auto ranks = mention_ranks(corpus, "V", {"a", "b", "c", "d", "e"});
  EXPECT_EQ(ranks.at("a"), 1u);
  EXPECT_EQ(ranks.at("b"), 2u);
  EXPECT_EQ(ranks.at("c"), 2u);
  EXPECT_EQ(ranks.at("d"), 5u);
  EXPECT_EQ(ranks.at("e"), 5u);
}

TEST(ClasswiseMrr, TopLanguageClassScoresOne) {
  const Corpus corpus({paper("1", "V", 2000, {"a", "b"}), paper("2", "V", 2000, {"a"})});
  const auto table = classwise_mrr(corpus, "V", {{"a", 5}, {"b", 3}}, {"a", "b"});
  EXPECT_DOUBLE_EQ(table.per_class.at(5).mrr, 1.0);
  EXPECT_DOUBLE_EQ(table.per_class.at(5).inverse_mrr, 1.0);
  EXPECT_FALSE(table.per_class.contains(0));
}

TEST(ClasswiseMrr, RanksTwoAndFour) {
  // Frequencies a:4 b:3 c:2 d:1 -> class 1 holds ranks 2 and 4.
  std::vector<PaperRecord> papers;
  const std::vector<std::set<std::string>> mentions = {{"a", "b", "c", "d"}, {"a", "b", "c"}, {"a", "b"}, {"a"}};
  for (std::size_t i = 0; i < mentions.size(); ++i) {
    papers.push_back(paper(std::to_string(i), "V", 2000, mentions[i]));
  }
  const auto table =
      classwise_mrr(Corpus(papers), "V", {{"a", 5}, {"b", 1}, {"c", 4}, {"d", 1}}, {"a", "b", "c", "d"});
  EXPECT_DOUBLE_EQ(table.per_class.at(1).mrr, 0.375);
  EXPECT_NEAR(table.per_class.at(1).inverse_mrr, 2.667, 1e-3);
  EXPECT_EQ(table.per_class.at(1).queries, 2u);
}

TEST(ClasswiseMrr, MatchesOracleAndMentionsOnlyHelp) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t languages = 1 + rng.index(10);
    const std::size_t papers = rng.index(31);
    ClassMap classes;
    std::set<std::string> universe;
    for (std::size_t l = 0; l < languages; ++l) {
      const std::string id = "L" + std::to_string(l);
      classes[id] = static_cast<int>(rng.index(6));
      universe.insert(id);
    }
    std::vector<PaperRecord> records;
    std::map<std::string, int> frequency;
    for (const auto& id : universe) frequency[id] = 0;
    for (std::size_t p = 0; p < papers; ++p) {
      std::set<std::string> mentioned;
      for (const auto& id : universe) {
        if (rng.bernoulli(0.3)) mentioned.insert(id);
      }
      for (const auto& id : mentioned) ++frequency[id];
      records.push_back(paper("p" + std::to_string(p), "V", 2000, mentioned));
    }
    const Corpus corpus(records);
    const auto table = classwise_mrr(corpus, "V", classes, universe);
    const auto truth = oracle::classwise_mrr(frequency, classes);
    ASSERT_EQ(table.per_class.size(), truth.size());
    for (const auto& [cls, value] : truth) EXPECT_EQ(table.per_class.at(cls).mrr, value);

    // One more paper mentioning a language never worsens that language's
    // own rank, so a single-member class never loses MRR.
    const auto target = std::next(classes.begin(), static_cast<std::ptrdiff_t>(rng.index(classes.size())));
    const auto before = mention_ranks(corpus, "V", universe).at(target->first);
    records.push_back(paper("extra", "V", 2000, {target->first}));
    const Corpus more(records);
    EXPECT_LE(mention_ranks(more, "V", universe).at(target->first), before);
    std::size_t members = 0;
    for (const auto& [id, cls] : classes) members += cls == target->second ? 1 : 0;
    if (members == 1) {
      const auto boosted = classwise_mrr(more, "V", classes, universe);
      EXPECT_GE(boosted.per_class.at(target->second).mrr, table.per_class.at(target->second).mrr);
    }
  }
}

TEST(ClasswiseMrr, BreakingATieInsideAClassCanLowerIt) {
  // a and b tie at rank 1; one more mention of b pushes a to rank 2.
  const Corpus tied({paper("1", "V", 2000, {"a", "b"})});
  const Corpus broken({paper("1", "V", 2000, {"a", "b"}), paper("2", "V", 2000, {"b"})});
  const ClassMap classes{{"a", 4}, {"b", 4}};
  EXPECT_DOUBLE_EQ(classwise_mrr(tied, "V", classes, {"a", "b"}).per_class.at(4).mrr, 1.0);
  EXPECT_DOUBLE_EQ(classwise_mrr(broken, "V", classes, {"a", "b"}).per_class.at(4).mrr, 0.75);
}

}  // namespace
}  // namespace langinc
