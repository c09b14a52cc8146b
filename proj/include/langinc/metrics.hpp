#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "langinc/corpus.hpp"
#include "langinc/taxonomy.hpp"

namespace langinc {

/// Paper x language mention matrix for one venue-year.
struct OccurrenceMatrix {
  std::string venue;
  int year = 0;
  std::vector<std::string> paper_ids;
  std::vector<std::string> language_ids;  // sorted
  std::vector<std::uint8_t> bits;         // row-major, paper_ids.size() x language_ids.size()

  std::size_t papers() const { return paper_ids.size(); }
  std::size_t languages() const { return language_ids.size(); }
  bool at(std::size_t paper, std::size_t language) const {
    return bits[paper * language_ids.size() + language] != 0;
  }
  std::vector<std::size_t> column_sums() const;
};

struct EntropyResult {
  std::string venue;
  int year = 0;
  double entropy = 0.0;  // nats
  std::size_t papers = 0;
  std::size_t languages_mentioned = 0;
};

struct MrrEntry {
  double mrr = 0.0;
  double inverse_mrr = 0.0;  // 1/mrr, infinity when mrr == 0
  std::size_t queries = 0;
};

struct MrrTable {
  std::string venue;
  std::map<LanguageClass, MrrEntry> per_class;
};

/// Rows follow corpus order; columns are the sorted ids mentioned by those
/// papers plus any ids in `extra_universe`.
OccurrenceMatrix occurrence_matrix(const Corpus& corpus, const std::string& venue, int year,
                                   const std::set<std::string>& extra_universe = {});

/// Normalized per-language mention rates, then Shannon entropy in nats.
EntropyResult occurrence_entropy(const OccurrenceMatrix& matrix);

/// One result per year with at least one paper, ascending by year.
std::vector<EntropyResult> entropy_series(const Corpus& corpus, const std::string& venue);

/// Competition ("1224") ranks by number of venue papers mentioning each
/// universe language. Unmentioned languages share rank |universe|.
std::map<std::string, std::size_t> mention_ranks(const Corpus& corpus, const std::string& venue,
                                                 const std::set<std::string>& universe);

/// Per-class mean reciprocal rank. Classes without members are omitted.
/// Mentions of ids outside `universe` are ignored.
MrrTable classwise_mrr(const Corpus& corpus, const std::string& venue, const ClassMap& taxonomy,
                       const std::set<std::string>& universe);

}  // namespace langinc
