#include "langinc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "langinc/error.hpp"
#include "langinc/random.hpp"
#include "langinc/text.hpp"

namespace langinc {
namespace {

template <typename T>
double cosine_distance_impl(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size()) {
    throw DataError("cosine distance of vectors with sizes " + std::to_string(a.size()) + " and " +
                    std::to_string(b.size()));
  }
  double dot_ab = 0.0;
  double norm_a = 0.0;
  double norm_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a[i];
    const double y = b[i];
    dot_ab += x * y;
    norm_a += x * x;
    norm_b += y * y;
  }
  if (!std::isfinite(dot_ab) || !std::isfinite(norm_a) || !std::isfinite(norm_b)) {
    throw DataError("cosine distance of a non-finite vector");
  }
  if (norm_a == 0.0 || norm_b == 0.0) throw DataError("cosine distance of a zero vector");
  const double cosine = dot_ab / (std::sqrt(norm_a) * std::sqrt(norm_b));
  return std::clamp(1.0 - cosine, 0.0, 2.0);
}

std::vector<double> mean_of_rows(const EmbeddingModel& model, const std::vector<std::size_t>& rows) {
  std::vector<double> mean(model.dim, 0.0);
  for (const auto row : rows) {
    const auto vector = model.entity_vector(row);
    for (std::size_t i = 0; i < model.dim; ++i) mean[i] += vector[i];
  }
  for (auto& value : mean) value /= static_cast<double>(rows.size());
  return mean;
}

std::vector<double> to_double(std::span<const float> values) {
  return {values.begin(), values.end()};
}

}  // namespace

double cosine_distance(std::span<const float> a, std::span<const float> b) {
  return cosine_distance_impl(a, b);
}

double cosine_distance(std::span<const double> a, std::span<const double> b) {
  return cosine_distance_impl(a, b);
}

DistanceTable class_distance_table(const EmbeddingModel& model, const ClassMap& taxonomy) {
  std::map<LanguageClass, std::vector<std::size_t>> members;
  for (const auto row : model.entities_of_kind(EntityKind::Language)) {
    members[class_of(taxonomy, model.entities[row].key)].push_back(row);
  }
  std::map<LanguageClass, std::vector<double>> class_means;
  for (const auto& [cls, rows] : members) class_means[cls] = mean_of_rows(model, rows);

  DistanceTable table;
  for (const auto row : model.entities_of_kind(EntityKind::Venue)) {
    const std::string& venue = model.entities[row].key;
    table.venues.push_back(venue);
    auto& values = table.values[venue];
    const auto venue_vector = to_double(model.entity_vector(row));
    for (const auto& [cls, mean] : class_means) {
      values[cls] = cosine_distance(std::span<const double>(venue_vector), std::span<const double>(mean));
    }
  }
  return table;
}

std::vector<std::size_t> nearest_entities(const EmbeddingModel& model, std::span<const float> query,
                                          EntityKind kind, std::size_t limit) {
  std::vector<std::pair<double, std::size_t>> scored;
  for (const auto row : model.entities_of_kind(kind)) {
    scored.emplace_back(cosine_distance(query, model.entity_vector(row)), row);
  }
  // Rows of one kind are sorted by key, so index order breaks ties by key.
  const std::size_t count = std::min(limit, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(count),
                    scored.end());
  std::vector<std::size_t> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(scored[i].second);
  return out;
}

LalMrrTable lal_mrr(const EmbeddingModel& model, const ClassMap& taxonomy,
                    const std::vector<std::size_t>& ks, std::size_t m) {
  if (ks.empty()) throw DataError("lal_mrr needs at least one K");
  const auto authors = model.entities_of_kind(EntityKind::Author);
  const auto languages = model.entities_of_kind(EntityKind::Language);
  const std::size_t max_k = *std::max_element(ks.begin(), ks.end());
  if (std::find(ks.begin(), ks.end(), 0) != ks.end() || m == 0) {
    throw DataError("K and M must be positive");
  }
  if (authors.size() < max_k) {
    throw DataError("lal_mrr: K=" + std::to_string(max_k) + " needs " + std::to_string(max_k) +
                    " authors, model has " + std::to_string(authors.size()) + " (short by " +
                    std::to_string(max_k - authors.size()) + ")");
  }
  if (languages.size() < m) {
    throw DataError("lal_mrr: M=" + std::to_string(m) + " needs " + std::to_string(m) +
                    " languages, model has " + std::to_string(languages.size()) + " (short by " +
                    std::to_string(m - languages.size()) + ")");
  }

  // Each author's M nearest languages, computed once.
  std::map<std::size_t, std::vector<std::size_t>> author_languages;
  for (const auto author : authors) {
    author_languages[author] =
        nearest_entities(model, model.entity_vector(author), EntityKind::Language, m);
  }

  LalMrrTable table;
  table.m = m;
  table.ks = ks;
  std::map<LanguageClass, std::map<std::size_t, double>> sums;
  std::map<LanguageClass, std::size_t> class_sizes;
  for (const auto language : languages) {
    const std::string& key = model.entities[language].key;
    const LanguageClass cls = class_of(taxonomy, key);
    ++class_sizes[cls];
    const auto near_authors =
        nearest_entities(model, model.entity_vector(language), EntityKind::Author, max_k);
    for (const std::size_t k : ks) {
      double total = 0.0;
      for (std::size_t a = 0; a < k; ++a) {
        const auto& list = author_languages.at(near_authors[a]);
        const auto it = std::find(list.begin(), list.end(), language);
        if (it != list.end()) total += 1.0 / static_cast<double>(it - list.begin() + 1);
      }
      const double value = total / static_cast<double>(k);
      table.per_language[key][k] = value;
      sums[cls][k] += value;
    }
  }
  for (const auto& [cls, by_k] : sums) {
    for (const auto& [k, sum] : by_k) {
      table.per_class[cls][k] = sum / static_cast<double>(class_sizes[cls]);
    }
  }
  return table;
}

PaperVector paper_vector(const EmbeddingModel& model, const PaperRecord& paper) {
  PaperVector result;
  result.values.assign(model.dim, 0.0);
  std::size_t used = 0;
  for (const auto& token : paper_tokens(paper)) {
    const auto index = model.vocab.find(token);
    if (!index) continue;
    const auto vector = model.word_vector(*index);
    for (std::size_t i = 0; i < model.dim; ++i) result.values[i] += vector[i];
    ++used;
  }
  if (used == 0) {
    result.oov = true;
    return result;
  }
  for (auto& value : result.values) value /= static_cast<double>(used);
  return result;
}

double OlsFit::predict(std::span<const double> features) const {
  double value = intercept;
  for (std::size_t i = 0; i < coefficients.size(); ++i) value += coefficients[i] * features[i];
  return value;
}

OlsFit fit_ols(const std::vector<std::vector<double>>& features, std::span<const double> targets,
               double ridge) {
  if (features.empty() || features.size() != targets.size()) {
    throw DataError("fit_ols: need matching, nonempty features and targets");
  }
  const std::size_t n = features.size();
  const std::size_t p = features.front().size();
  // Centering separates the intercept so the ridge term never touches it.
  Eigen::VectorXd feature_mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
  double target_mean = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    if (features[r].size() != p) throw DataError("fit_ols: ragged feature rows");
    for (std::size_t c = 0; c < p; ++c) feature_mean[static_cast<Eigen::Index>(c)] += features[r][c];
    target_mean += targets[r];
  }
  feature_mean /= static_cast<double>(n);
  target_mean /= static_cast<double>(n);

  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    const auto row = static_cast<Eigen::Index>(r);
    for (std::size_t c = 0; c < p; ++c) {
      const auto col = static_cast<Eigen::Index>(c);
      x(row, col) = features[r][c] - feature_mean[col];
    }
    y[row] = targets[r] - target_mean;
  }
  Eigen::MatrixXd normal = x.transpose() * x;
  normal.diagonal().array() += ridge;
  const Eigen::VectorXd beta = normal.ldlt().solve(x.transpose() * y);

  OlsFit fit;
  fit.coefficients.assign(beta.data(), beta.data() + beta.size());
  fit.intercept = target_mean - feature_mean.dot(beta);
  return fit;
}

std::optional<double> r2_score(std::span<const double> truth, std::span<const double> predicted) {
  if (truth.empty()) return std::nullopt;
  const double mean = std::accumulate(truth.begin(), truth.end(), 0.0) / static_cast<double>(truth.size());
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ss_res += (truth[i] - predicted[i]) * (truth[i] - predicted[i]);
    ss_tot += (truth[i] - mean) * (truth[i] - mean);
  }
  if (ss_tot == 0.0) return std::nullopt;
  return 1.0 - ss_res / ss_tot;
}

double mean_absolute_error(std::span<const double> truth, std::span<const double> predicted) {
  if (truth.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) total += std::abs(truth[i] - predicted[i]);
  return total / static_cast<double>(truth.size());
}

RegressionEval year_regression_eval(const EmbeddingModel& model, const Corpus& corpus,
                                    std::uint64_t split_seed, double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw DataError("train fraction must lie strictly between 0 and 1");
  }
  RegressionEval eval;
  eval.split_seed = split_seed;
  eval.train_fraction = train_fraction;

  std::vector<std::vector<double>> vectors;
  std::vector<double> years;
  for (const auto& paper : corpus.papers()) {
    auto vector = paper_vector(model, paper);
    if (vector.oov) {
      ++eval.oov_excluded;
      continue;
    }
    vectors.push_back(std::move(vector.values));
    years.push_back(static_cast<double>(paper.year));
  }
  const std::size_t n = vectors.size();
  if (n < static_cast<std::size_t>(model.dim) + 2) {
    throw DataError("year regression needs at least dim+2 = " + std::to_string(model.dim + 2) +
                    " papers with in-vocabulary tokens, found " + std::to_string(n));
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(split_seed);
  rng.shuffle(std::span<std::size_t>(order));
  const auto split = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n))), 1, n - 1);

  std::vector<std::vector<double>> train_x;
  std::vector<double> train_y;
  for (std::size_t i = 0; i < split; ++i) {
    train_x.push_back(vectors[order[i]]);
    train_y.push_back(years[order[i]]);
  }
  const OlsFit fit = fit_ols(train_x, train_y);

  std::vector<double> truth;
  std::vector<double> predicted;
  for (std::size_t i = split; i < n; ++i) {
    truth.push_back(years[order[i]]);
    predicted.push_back(fit.predict(vectors[order[i]]));
  }
  eval.train_size = split;
  eval.test_size = n - split;
  eval.r2 = r2_score(truth, predicted);
  eval.mae = mean_absolute_error(truth, predicted);
  return eval;
}

}  // namespace langinc
