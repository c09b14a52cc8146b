#include <gtest/gtest.h>

#include <sstream>

#include "langinc/embed.hpp"
#include "langinc/error.hpp"
#include "langinc/synth.hpp"
#include "langinc/text.hpp"

namespace langinc {
namespace {

TEST(Synth, DefaultSpecSizes) {
  const auto planted = synth::generate({});
  EXPECT_EQ(planted.corpus.size(), 150u);
  EXPECT_EQ(planted.corpus.venues().size(), 3u);
  EXPECT_EQ(planted.gazetteer.ids().size(), 3u);
  EXPECT_EQ(planted.resources.size(), 3u);
  EXPECT_EQ(planted.truth.community_language.size(), 3u);
  for (const auto& p : planted.corpus.papers()) EXPECT_FALSE(p.languages_annotated);
}

TEST(Synth, SameSeedSameCorpus) {
  synth::PlantSpec spec;
  spec.seed = 9;
  std::ostringstream a, b, c;
  write_corpus(synth::generate(spec).corpus, a);
  write_corpus(synth::generate(spec).corpus, b);
  spec.seed = 10;
  write_corpus(synth::generate(spec).corpus, c);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_NE(a.str(), c.str());
}

TEST(Synth, PapersAreMostlyTopical) {
  const auto planted = synth::generate({});
  std::set<std::string> names;
  for (const auto& info : planted.resources) names.insert(text::to_lower(info.name));
  for (const auto& p : planted.corpus.papers()) {
    const std::size_t community = planted.truth.paper_community.at(p.id);
    const auto& topical = planted.truth.topical_words[community];
    const std::set<std::string> own(topical.begin(), topical.end());
    std::size_t hits = 0;
    std::size_t body_tokens = 0;
    for (const auto& token : paper_tokens(p)) {
      // Drift markers and the language name sit outside the 80/20 mix.
      if (token.starts_with("y") && token.find('d') != std::string::npos && token.size() > 5) continue;
      if (names.contains(token)) continue;
      ++body_tokens;
      hits += own.contains(token) ? 1 : 0;
    }
    ASSERT_GT(body_tokens, 0u);
    EXPECT_GE(static_cast<double>(hits) / static_cast<double>(body_tokens), 0.6) << p.id;
  }
}

TEST(Synth, GroundTruthIsConsistent) {
  const auto planted = synth::generate({});
  const Corpus annotated = annotate(planted.corpus, planted.gazetteer);
  for (const auto& p : annotated.papers()) {
    const std::size_t community = planted.truth.paper_community.at(p.id);
    EXPECT_EQ(p.languages, (std::set<std::string>{planted.truth.community_language[community]})) << p.id;
    EXPECT_EQ(planted.truth.venue_community.at(p.venue), community);
    for (const auto& a : p.authors) EXPECT_EQ(planted.truth.author_community.at(a), community);
  }
  EXPECT_EQ(planted.truth.author_community.size(), 15u);
  for (const auto& info : planted.resources) {
    EXPECT_EQ(planted.truth.language_classes.at(info.id),
              classify_language(info.labeled_count, info.unlabeled_count));
  }
}

TEST(Synth, YearsCoverTheRange) {
  synth::PlantSpec spec;
  spec.papers_per_author = 20;
  const auto planted = synth::generate(spec);
  const auto years = planted.corpus.years();
  EXPECT_EQ(*years.begin(), spec.first_year);
  EXPECT_EQ(*years.rbegin(), spec.last_year);
}

TEST(Synth, InvalidSpecs) {
  synth::PlantSpec spec;
  spec.communities = 0;
  EXPECT_THROW(synth::generate(spec), DataError);
  spec = {};
  spec.first_year = 2020;
  spec.last_year = 2019;
  EXPECT_THROW(synth::generate(spec), DataError);
  spec = {};
  spec.venues = 2;
  EXPECT_THROW(synth::generate(spec), DataError);
}

TEST(Synth, LanguageNamesAreDistinctWords) {
  std::set<std::string> names;
  for (std::size_t i = 0; i < 50; ++i) {
    const auto name = synth::language_name(i);
    EXPECT_TRUE(std::isupper(static_cast<unsigned char>(name[0])));
    names.insert(name);
  }
  EXPECT_EQ(names.size(), 50u);
}

}  // namespace
}  // namespace langinc
