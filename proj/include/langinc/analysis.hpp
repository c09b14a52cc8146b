#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "langinc/corpus.hpp"
#include "langinc/embed.hpp"
#include "langinc/taxonomy.hpp"

namespace langinc {

/// 1 - cos(a, b), clamped to [0, 2]. Throws DataError on a zero or
/// non-finite vector or a length mismatch.
double cosine_distance(std::span<const float> a, std::span<const float> b);
double cosine_distance(std::span<const double> a, std::span<const double> b);

/// Venue rows, class columns. Classes with no embedded language are absent.
struct DistanceTable {
  std::vector<std::string> venues;
  std::map<std::string, std::map<LanguageClass, double>> values;
};

DistanceTable class_distance_table(const EmbeddingModel& model, const ClassMap& taxonomy);

struct LalMrrTable {
  std::size_t m = 20;
  std::vector<std::size_t> ks;
  std::map<LanguageClass, std::map<std::size_t, double>> per_class;
  std::map<std::string, std::map<std::size_t, double>> per_language;
};

/// Language-author-language MRR: for each embedded language L, take its K
/// nearest authors; for each author, the rank of L among that author's M
/// nearest languages (0 if absent); average the reciprocal over the K
/// authors. A class scores the mean over its embedded languages. Ties in
/// distance go to the smaller entity key. Throws DataError when the model
/// has fewer than max(K) authors or fewer than M languages.
LalMrrTable lal_mrr(const EmbeddingModel& model, const ClassMap& taxonomy,
                    const std::vector<std::size_t>& ks, std::size_t m = 20);

/// Indices of entities of `kind`, nearest first by cosine distance to
/// `query`, ties by key. At most `limit` entries.
std::vector<std::size_t> nearest_entities(const EmbeddingModel& model, std::span<const float> query,
                                          EntityKind kind, std::size_t limit);

struct PaperVector {
  std::vector<double> values;
  bool oov = false;  // no in-vocab tokens; values are all zero
};

/// Mean of the word vectors of the paper's in-vocab title+abstract tokens,
/// counting repeated tokens once per occurrence.
PaperVector paper_vector(const EmbeddingModel& model, const PaperRecord& paper);

struct OlsFit {
  std::vector<double> coefficients;
  double intercept = 0.0;

  double predict(std::span<const double> features) const;
};

/// Least squares with an unpenalized intercept; `ridge` is added to the
/// diagonal of the feature block of the normal equations.
OlsFit fit_ols(const std::vector<std::vector<double>>& features, std::span<const double> targets,
               double ridge = 1e-6);

/// 1 - SS_res/SS_tot; nullopt when the targets have zero variance.
std::optional<double> r2_score(std::span<const double> truth, std::span<const double> predicted);
double mean_absolute_error(std::span<const double> truth, std::span<const double> predicted);

struct RegressionEval {
  std::optional<double> r2;  // undefined on a constant-year test split
  double mae = 0.0;
  std::uint64_t split_seed = 42;
  double train_fraction = 0.8;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::size_t oov_excluded = 0;
};

/// Seeded shuffled split of the non-OOV papers, OLS from paper vectors to
/// year on the train part, R^2 and MAE on the rest. Throws DataError with
/// fewer than dim + 2 usable papers.
RegressionEval year_regression_eval(const EmbeddingModel& model, const Corpus& corpus,
                                    std::uint64_t split_seed = 42, double train_fraction = 0.8);

// ---------------------------------------------------------------------------
// t-SNE
// ---------------------------------------------------------------------------

struct TsneConfig {
  double perplexity = 30.0;
  std::size_t iterations = 1000;
  double learning_rate = 200.0;
  double exaggeration = 12.0;
  std::size_t exaggeration_iterations = 250;
  double initial_momentum = 0.5;
  double final_momentum = 0.8;
  std::uint64_t seed = 42;
};

struct TsneResult {
  std::vector<double> coords;  // n x 2 row-major
  double initial_kl = 0.0;
  double final_kl = 0.0;
  double effective_perplexity = 0.0;
};

/// Exact t-SNE of row-major `points` (n x dim) with squared Euclidean input
/// distances. Throws DataError when n < 4.
TsneResult tsne(std::span<const double> points, std::size_t dim, const TsneConfig& config = {});

struct EntitySelection {
  std::set<EntityKind> kinds;         // empty: every kind
  std::set<std::string> venues;       // restricts Venue/VenueIteration entities when nonempty
  std::optional<ClassMap> language_classes;
  std::set<LanguageClass> classes;    // restricts languages when nonempty

  bool accepts(const EntityId& id) const;
};

struct Projection2D {
  std::vector<EntityId> labels;
  std::vector<double> coords;  // n x 2 row-major
  double initial_kl = 0.0;
  double final_kl = 0.0;

  std::size_t size() const { return labels.size(); }
};

Projection2D tsne_project(const EmbeddingModel& model, const EntitySelection& selection,
                          const TsneConfig& config = {});

}  // namespace langinc
