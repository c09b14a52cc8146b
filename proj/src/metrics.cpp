#include "langinc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace langinc {

std::vector<std::size_t> OccurrenceMatrix::column_sums() const {
  std::vector<std::size_t> sums(languages(), 0);
  for (std::size_t i = 0; i < papers(); ++i) {
    for (std::size_t j = 0; j < languages(); ++j) sums[j] += at(i, j) ? 1 : 0;
  }
  return sums;
}

OccurrenceMatrix occurrence_matrix(const Corpus& corpus, const std::string& venue, int year,
                                   const std::set<std::string>& extra_universe) {
  OccurrenceMatrix matrix;
  matrix.venue = venue;
  matrix.year = year;
  std::vector<const PaperRecord*> rows;
  std::set<std::string> columns = extra_universe;
  for (const auto& paper : corpus.papers()) {
    if (paper.venue != venue || paper.year != year) continue;
    rows.push_back(&paper);
    columns.insert(paper.languages.begin(), paper.languages.end());
  }
  matrix.language_ids.assign(columns.begin(), columns.end());
  matrix.bits.assign(rows.size() * columns.size(), 0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    matrix.paper_ids.push_back(rows[i]->id);
    for (std::size_t j = 0; j < matrix.language_ids.size(); ++j) {
      if (rows[i]->languages.contains(matrix.language_ids[j])) {
        matrix.bits[i * matrix.language_ids.size() + j] = 1;
      }
    }
  }
  return matrix;
}

EntropyResult occurrence_entropy(const OccurrenceMatrix& matrix) {
  EntropyResult result;
  result.venue = matrix.venue;
  result.year = matrix.year;
  result.papers = matrix.papers();
  const auto sums = matrix.column_sums();
  result.languages_mentioned =
      static_cast<std::size_t>(std::count_if(sums.begin(), sums.end(), [](auto s) { return s > 0; }));
  if (matrix.papers() == 0 || result.languages_mentioned == 0) return result;

  const double papers = static_cast<double>(matrix.papers());
  std::vector<double> rates(sums.size());
  double total = 0.0;
  for (std::size_t j = 0; j < sums.size(); ++j) {
    rates[j] = static_cast<double>(sums[j]) / papers;
    total += rates[j];
  }
  double entropy = 0.0;
  for (const double rate : rates) {
    const double p = rate / total;
    if (p > 0.0) entropy -= p * std::log(p);
  }
  result.entropy = std::max(entropy, 0.0);
  return result;
}

std::vector<EntropyResult> entropy_series(const Corpus& corpus, const std::string& venue) {
  std::set<int> years;
  for (const auto& paper : corpus.papers()) {
    if (paper.venue == venue) years.insert(paper.year);
  }
  std::vector<EntropyResult> series;
  series.reserve(years.size());
  for (const int year : years) series.push_back(occurrence_entropy(occurrence_matrix(corpus, venue, year)));
  return series;
}

std::map<std::string, std::size_t> mention_ranks(const Corpus& corpus, const std::string& venue,
                                                 const std::set<std::string>& universe) {
  std::map<std::string, std::size_t> frequency;
  for (const auto& id : universe) frequency[id] = 0;
  for (const auto& paper : corpus.papers()) {
    if (paper.venue != venue) continue;
    for (const auto& id : paper.languages) {
      if (const auto it = frequency.find(id); it != frequency.end()) ++it->second;
    }
  }
  std::vector<std::size_t> mentioned;
  for (const auto& [id, count] : frequency) {
    if (count > 0) mentioned.push_back(count);
  }
  std::sort(mentioned.begin(), mentioned.end(), std::greater<>());

  std::map<std::string, std::size_t> ranks;
  for (const auto& [id, count] : frequency) {
    if (count == 0) {
      ranks[id] = universe.size();
      continue;
    }
    // Competition rank: one plus the number of strictly more frequent languages.
    const auto better = std::lower_bound(mentioned.begin(), mentioned.end(), count, std::greater<>());
    ranks[id] = static_cast<std::size_t>(better - mentioned.begin()) + 1;
  }
  return ranks;
}

MrrTable classwise_mrr(const Corpus& corpus, const std::string& venue, const ClassMap& taxonomy,
                       const std::set<std::string>& universe) {
  std::set<std::string> ranked = universe;
  for (const auto& [id, cls] : taxonomy) ranked.insert(id);
  const auto ranks = mention_ranks(corpus, venue, ranked);

  MrrTable table;
  table.venue = venue;
  std::map<LanguageClass, double> reciprocal_sum;
  for (const auto& [id, cls] : taxonomy) {
    reciprocal_sum[cls] += 1.0 / static_cast<double>(ranks.at(id));
    ++table.per_class[cls].queries;
  }
  for (auto& [cls, entry] : table.per_class) {
    entry.mrr = reciprocal_sum[cls] / static_cast<double>(entry.queries);
    entry.inverse_mrr = entry.mrr > 0.0 ? 1.0 / entry.mrr : std::numeric_limits<double>::infinity();
  }
  return table;
}

}  // namespace langinc
