#include <algorithm>
#include <cmath>
#include <limits>

#include "langinc/analysis.hpp"
#include "langinc/error.hpp"
#include "langinc/random.hpp"

namespace langinc {
namespace {

constexpr double kFloor = 1e-12;

std::vector<double> squared_distances(std::span<const double> points, std::size_t n,
                                      std::size_t dim) {
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double sum = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double diff = points[i * dim + k] - points[j * dim + k];
        sum += diff * diff;
      }
      d[i * n + j] = sum;
      d[j * n + i] = sum;
    }
  }
  return d;
}

// Row-conditional Gaussian affinities whose entropy matches log(perplexity),
// found by bisection on the precision of each row, then symmetrized.
std::vector<double> joint_affinities(const std::vector<double>& distances, std::size_t n,
                                     double perplexity) {
  const double target_entropy = std::log(perplexity);
  std::vector<double> conditional(n * n, 0.0);
  std::vector<double> row(n);
  for (std::size_t i = 0; i < n; ++i) {
    double beta = 1.0;
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    for (int attempt = 0; attempt < 200; ++attempt) {
      double min_distance = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) min_distance = std::min(min_distance, distances[i * n + j]);
      }
      double sum = 0.0;
      double weighted = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) {
          row[j] = 0.0;
          continue;
        }
        // Shifting by the nearest distance keeps exp() away from underflow.
        const double shifted = distances[i * n + j] - min_distance;
        row[j] = std::exp(-beta * shifted);
        sum += row[j];
        weighted += row[j] * shifted;
      }
      const double entropy = std::log(sum) + beta * weighted / sum;
      for (std::size_t j = 0; j < n; ++j) row[j] /= sum;
      const double gap = entropy - target_entropy;
      if (std::abs(gap) < 1e-5) break;
      if (gap > 0.0) {
        lo = beta;
        beta = std::isinf(hi) ? beta * 2.0 : (beta + hi) / 2.0;
      } else {
        hi = beta;
        beta = (beta + lo) / 2.0;
      }
    }
    std::copy(row.begin(), row.end(), conditional.begin() + static_cast<std::ptrdiff_t>(i * n));
  }
  std::vector<double> joint(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      joint[i * n + j] =
          std::max((conditional[i * n + j] + conditional[j * n + i]) / (2.0 * static_cast<double>(n)),
                   kFloor);
    }
  }
  return joint;
}

// Student-t kernel numerators and their sum for the current layout.
double student_kernel(const std::vector<double>& y, std::size_t n, std::vector<double>& numerators) {
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    numerators[i * n + i] = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = y[2 * i] - y[2 * j];
      const double dy = y[2 * i + 1] - y[2 * j + 1];
      const double value = 1.0 / (1.0 + dx * dx + dy * dy);
      numerators[i * n + j] = value;
      numerators[j * n + i] = value;
      total += 2.0 * value;
    }
  }
  return total;
}

double kl_divergence(const std::vector<double>& p, const std::vector<double>& y, std::size_t n) {
  std::vector<double> numerators(n * n);
  const double total = student_kernel(y, n, numerators);
  double kl = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double q = std::max(numerators[i * n + j] / total, kFloor);
      kl += p[i * n + j] * std::log(p[i * n + j] / q);
    }
  }
  return kl;
}

}  // namespace

TsneResult tsne(std::span<const double> points, std::size_t dim, const TsneConfig& config) {
  if (dim == 0 || points.size() % dim != 0) throw DataError("t-SNE input is not n x dim");
  const std::size_t n = points.size() / dim;
  if (n < 4) throw DataError("t-SNE needs at least 4 points, got " + std::to_string(n));
  for (const double value : points) {
    if (!std::isfinite(value)) throw DataError("t-SNE input contains a non-finite value");
  }

  TsneResult result;
  result.effective_perplexity = std::min(config.perplexity, static_cast<double>(n - 1) / 3.0);
  const auto p = joint_affinities(squared_distances(points, n, dim), n, result.effective_perplexity);

  Rng rng(config.seed);
  std::vector<double> y(n * 2);
  for (auto& value : y) value = 1e-4 * rng.normal();
  result.initial_kl = kl_divergence(p, y, n);

  std::vector<double> velocity(n * 2, 0.0);
  std::vector<double> gains(n * 2, 1.0);
  std::vector<double> gradient(n * 2, 0.0);
  std::vector<double> numerators(n * n);
  for (std::size_t iteration = 0; iteration < config.iterations; ++iteration) {
    const bool early = iteration < config.exaggeration_iterations;
    const double exaggeration = early ? config.exaggeration : 1.0;
    const double momentum = early ? config.initial_momentum : config.final_momentum;
    const double total = student_kernel(y, n, numerators);

    std::fill(gradient.begin(), gradient.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const double q = std::max(numerators[i * n + j] / total, kFloor);
        const double force = 4.0 * (exaggeration * p[i * n + j] - q) * numerators[i * n + j];
        gradient[2 * i] += force * (y[2 * i] - y[2 * j]);
        gradient[2 * i + 1] += force * (y[2 * i + 1] - y[2 * j + 1]);
      }
    }
    for (std::size_t k = 0; k < y.size(); ++k) {
      const bool same_direction = (gradient[k] > 0.0) == (velocity[k] > 0.0);
      gains[k] = std::max(same_direction ? gains[k] * 0.8 : gains[k] + 0.2, 0.01);
      velocity[k] = momentum * velocity[k] - config.learning_rate * gains[k] * gradient[k];
      y[k] += velocity[k];
    }
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mean_x += y[2 * i];
      mean_y += y[2 * i + 1];
    }
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[2 * i] -= mean_x;
      y[2 * i + 1] -= mean_y;
    }
  }
  result.final_kl = kl_divergence(p, y, n);
  result.coords = std::move(y);
  return result;
}

bool EntitySelection::accepts(const EntityId& id) const {
  if (!kinds.empty() && !kinds.contains(id.kind)) return false;
  if (!venues.empty()) {
    if (id.kind == EntityKind::Venue && !venues.contains(id.key)) return false;
    if (id.kind == EntityKind::VenueIteration) {
      const auto underscore = id.key.rfind('_');
      if (!venues.contains(id.key.substr(0, underscore))) return false;
    }
  }
  if (!classes.empty() && id.kind == EntityKind::Language) {
    const LanguageClass cls = language_classes ? class_of(*language_classes, id.key) : 0;
    if (!classes.contains(cls)) return false;
  }
  return true;
}

Projection2D tsne_project(const EmbeddingModel& model, const EntitySelection& selection,
                          const TsneConfig& config) {
  Projection2D projection;
  std::vector<double> points;
  for (std::size_t row = 0; row < model.entities.size(); ++row) {
    if (!selection.accepts(model.entities[row])) continue;
    projection.labels.push_back(model.entities[row]);
    const auto vector = model.entity_vector(row);
    points.insert(points.end(), vector.begin(), vector.end());
  }
  if (projection.labels.size() < 4) {
    throw DataError("projection needs at least 4 selected entities, got " +
                    std::to_string(projection.labels.size()));
  }
  auto result = tsne(points, model.dim, config);
  projection.coords = std::move(result.coords);
  projection.initial_kl = result.initial_kl;
  projection.final_kl = result.final_kl;
  return projection;
}

}  // namespace langinc
