#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "langinc/corpus.hpp"
#include "langinc/taxonomy.hpp"

namespace langinc::synth {

/// Knobs for a planted corpus. Each community owns one language, one venue,
/// a set of authors and a topical vocabulary.
struct PlantSpec {
  std::size_t communities = 3;
  std::size_t authors_per_community = 5;
  std::size_t papers_per_author = 10;
  std::size_t topical_words_per_community = 30;
  std::size_t shared_words = 30;
  // Must be >= communities; community c owns venue c, any extra venues are
  // shared and receive papers with probability 1 - dedicated_venue_fraction.
  std::size_t venues = 3;
  double dedicated_venue_fraction = 1.0;
  int first_year = 2010;
  int last_year = 2019;
  std::size_t drift_words_per_year = 3;
  std::size_t drift_tokens_per_paper = 6;
  std::size_t title_tokens = 8;
  std::size_t abstract_tokens = 40;
  double topical_fraction = 0.8;
  double coauthor_probability = 0.3;
  std::uint64_t seed = 42;

  /// Throws DataError on zero counts, an empty year range or bad fractions.
  void validate() const;
};

struct GroundTruth {
  std::map<std::string, std::size_t> author_community;
  std::map<std::string, std::size_t> language_community;
  std::map<std::string, std::size_t> venue_community;  // dedicated venues only
  std::map<std::string, std::size_t> paper_community;
  std::vector<std::string> community_language;
  std::vector<std::string> community_venue;
  std::vector<std::vector<std::string>> topical_words;
  ClassMap language_classes;
};

struct PlantedCorpus {
  // Papers carry no language annotation; detection with the gazetteer
  // recovers exactly the community language.
  Corpus corpus;
  Gazetteer gazetteer;
  std::vector<LanguageInfo> resources;
  GroundTruth truth;
};

PlantedCorpus generate(const PlantSpec& spec);

/// Letters-only capitalized name for language `index`, e.g. "Bakari".
std::string language_name(std::size_t index);

}  // namespace langinc::synth
