#include "langinc/synth.hpp"

#include <array>
#include <string_view>

#include "langinc/error.hpp"
#include "langinc/random.hpp"

namespace langinc::synth {
namespace {

constexpr std::string_view kConsonants = "bdfgklmnprstvz";
constexpr std::string_view kVowels = "aeiou";

std::string syllable(std::size_t index) {
  std::string out;
  out.push_back(kConsonants[index / kVowels.size() % kConsonants.size()]);
  out.push_back(kVowels[index % kVowels.size()]);
  return out;
}

// Resource counts that land in each class under the default thresholds.
constexpr std::array<std::pair<std::uint64_t, std::uint64_t>, kNumClasses> kClassResources = {{
    {0, 10},
    {0, 500},
    {5, 500},
    {5, 50'000},
    {50, 50'000},
    {200, 2'000'000},
}};

std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& word : words) {
    if (!out.empty()) out.push_back(' ');
    out += word;
  }
  return out;
}

}  // namespace

void PlantSpec::validate() const {
  if (communities == 0 || authors_per_community == 0 || papers_per_author == 0 ||
      topical_words_per_community == 0 || shared_words == 0 || venues == 0 ||
      title_tokens + abstract_tokens == 0) {
    throw DataError("plant spec counts must be positive");
  }
  if (venues < communities) throw DataError("plant spec needs at least one venue per community");
  if (first_year > last_year) throw DataError("plant spec year range is empty");
  if (first_year < kMinYear || last_year > kMaxYear) throw DataError("plant spec years out of range");
  for (const double fraction : {topical_fraction, dedicated_venue_fraction, coauthor_probability}) {
    if (!(fraction >= 0.0 && fraction <= 1.0)) throw DataError("plant spec fractions must be in [0, 1]");
  }
}

std::string language_name(std::size_t index) {
  constexpr std::size_t kSyllables = kConsonants.size() * kVowels.size();
  std::string name = syllable(index % kSyllables) + syllable(index / kSyllables % kSyllables) +
                     syllable(index / (kSyllables * kSyllables) % kSyllables) + "an";
  name.front() = static_cast<char>(name.front() - 'a' + 'A');
  return name;
}

PlantedCorpus generate(const PlantSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  PlantedCorpus planted;
  GroundTruth& truth = planted.truth;

  std::vector<std::string> shared;
  for (std::size_t k = 0; k < spec.shared_words; ++k) shared.push_back("s" + std::to_string(k));

  std::vector<std::vector<std::string>> authors(spec.communities);
  for (std::size_t c = 0; c < spec.communities; ++c) {
    const std::string language = "lang" + std::to_string(c);
    const std::string name = language_name(c);
    const std::string venue = "V" + std::to_string(c);
    planted.gazetteer.add(language, name);
    const LanguageClass cls = static_cast<LanguageClass>(kNumClasses - 1 - c % kNumClasses);
    planted.resources.push_back({language, name, kClassResources[cls].first,
                                 kClassResources[cls].second, 1'000'000, cls});
    truth.community_language.push_back(language);
    truth.community_venue.push_back(venue);
    truth.language_community[language] = c;
    truth.venue_community[venue] = c;
    truth.language_classes[language] = cls;
    std::vector<std::string> topical;
    for (std::size_t k = 0; k < spec.topical_words_per_community; ++k) {
      topical.push_back("c" + std::to_string(c) + "w" + std::to_string(k));
    }
    truth.topical_words.push_back(std::move(topical));
    for (std::size_t a = 0; a < spec.authors_per_community; ++a) {
      const std::string author = "a" + std::to_string(c) + "_" + std::to_string(a);
      authors[c].push_back(author);
      truth.author_community[author] = c;
    }
  }
  std::vector<std::string> extra_venues;
  for (std::size_t v = spec.communities; v < spec.venues; ++v) {
    extra_venues.push_back("S" + std::to_string(v - spec.communities));
  }

  auto draw_word = [&](std::size_t community) -> const std::string& {
    if (rng.bernoulli(spec.topical_fraction)) {
      const auto& topical = truth.topical_words[community];
      return topical[rng.index(topical.size())];
    }
    return shared[rng.index(shared.size())];
  };

  const auto year_span = static_cast<std::size_t>(spec.last_year - spec.first_year + 1);
  std::vector<PaperRecord> papers;
  for (std::size_t c = 0; c < spec.communities; ++c) {
    for (std::size_t a = 0; a < spec.authors_per_community; ++a) {
      for (std::size_t p = 0; p < spec.papers_per_author; ++p) {
        PaperRecord paper;
        paper.id = "p" + std::to_string(c) + "_" + std::to_string(a) + "_" + std::to_string(p);
        paper.year = spec.first_year + static_cast<int>(rng.index(year_span));
        paper.venue = truth.community_venue[c];
        if (!extra_venues.empty() && !rng.bernoulli(spec.dedicated_venue_fraction)) {
          paper.venue = extra_venues[rng.index(extra_venues.size())];
        }
        paper.authors.push_back(authors[c][a]);
        if (spec.authors_per_community > 1 && rng.bernoulli(spec.coauthor_probability)) {
          std::size_t other = rng.index(spec.authors_per_community - 1);
          if (other >= a) ++other;
          paper.authors.push_back(authors[c][other]);
        }

        std::vector<std::string> title;
        for (std::size_t t = 0; t < spec.title_tokens; ++t) title.push_back(draw_word(c));
        std::vector<std::string> abstract;
        for (std::size_t t = 0; t < spec.abstract_tokens; ++t) abstract.push_back(draw_word(c));
        if (spec.drift_words_per_year > 0) {
          const std::string prefix = "y" + std::to_string(paper.year) + "d";
          for (std::size_t d = 0; d < spec.drift_tokens_per_paper; ++d) {
            abstract.insert(abstract.begin() + static_cast<std::ptrdiff_t>(rng.index(abstract.size() + 1)),
                            prefix + std::to_string(rng.index(spec.drift_words_per_year)));
          }
        }
        abstract.insert(abstract.begin() + static_cast<std::ptrdiff_t>(rng.index(abstract.size() + 1)),
                        language_name(c));
        paper.title = join(title);
        paper.abstract = join(abstract) + ".";
        truth.paper_community[paper.id] = c;
        papers.push_back(std::move(paper));
      }
    }
  }
  planted.corpus = Corpus(std::move(papers));
  return planted;
}

}  // namespace langinc::synth
