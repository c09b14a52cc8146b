#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "langinc/corpus.hpp"

namespace langinc {

enum class EntityKind : std::uint8_t { Author = 0, Language = 1, Venue = 2, VenueIteration = 3 };

std::string_view to_string(EntityKind kind);
std::optional<EntityKind> parse_entity_kind(std::string_view name);

struct EntityId {
  EntityKind kind = EntityKind::Author;
  std::string key;

  auto operator<=>(const EntityId&) const = default;
  bool operator==(const EntityId&) const = default;
};

/// "ACL" + 2019 -> "ACL_2019"
std::string venue_iteration_key(std::string_view venue, int year);

struct Vocab {
  std::vector<std::string> words;       // index order: count desc, then token asc
  std::vector<std::uint64_t> counts;
  std::uint64_t min_count = 1;

  std::size_t size() const { return words.size(); }
  std::optional<std::uint32_t> find(std::string_view word) const;
  void rebuild_index();

  bool operator==(const Vocab& other) const {
    return words == other.words && counts == other.counts && min_count == other.min_count;
  }

 private:
  std::unordered_map<std::string, std::uint32_t> index_;
};

/// Title + abstract tokens, lowercased runs of letters and digits.
std::vector<std::string> paper_tokens(const PaperRecord& paper);

/// Throws DataError when nothing survives min_count.
Vocab build_vocab(const Corpus& corpus, std::uint64_t min_count);

/// Authors, languages, venue and venue iteration of every paper, sorted by
/// (kind, key) without duplicates.
std::vector<EntityId> collect_entities(const Corpus& corpus);
std::vector<EntityId> paper_entities(const PaperRecord& paper);

struct TrainConfig {
  std::uint32_t dim = 75;
  std::uint32_t epochs = 5;
  std::uint32_t k_words = 20;
  std::uint32_t negatives = 5;
  double initial_lr = 0.025;
  double final_lr = 1e-4;
  std::uint64_t min_count = 5;
  // Frequent-word subsampling threshold; 0 disables it.
  double subsample = 0.0;
  std::uint64_t seed = 42;
  std::uint32_t threads = 1;

  /// Throws DataError on non-positive settings or dim < 2.
  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

/// Entity matrix (E x N) and word matrix (V x N), both row-major float.
struct EmbeddingModel {
  std::uint32_t dim = 0;
  std::vector<EntityId> entities;
  Vocab vocab;
  std::vector<float> entity_vectors;
  std::vector<float> word_vectors;
  TrainConfig config;

  std::size_t entity_count() const { return entities.size(); }
  std::span<const float> entity_vector(std::size_t row) const {
    return {entity_vectors.data() + row * dim, dim};
  }
  std::span<const float> word_vector(std::size_t row) const {
    return {word_vectors.data() + row * dim, dim};
  }
  std::optional<std::size_t> find_entity(const EntityId& id) const;
  std::vector<std::size_t> entities_of_kind(EntityKind kind) const;

  bool operator==(const EmbeddingModel& other) const;
};

struct TrainStats {
  std::vector<double> epoch_mean_loss;
  std::size_t skipped_papers = 0;  // no in-vocab tokens
  std::uint64_t updates = 0;
};

// ---------------------------------------------------------------------------
// Negative-sampling objective
// ---------------------------------------------------------------------------

inline constexpr double kScoreClamp = 30.0;

/// Loss term and d(loss)/d(score) for one (entity, word) pair.
/// label 1: -ln s(score); label 0: -ln s(-score). Scores are clamped first.
template <std::floating_point T>
struct PairTerm {
  T loss;
  T coefficient;
};

template <std::floating_point T>
PairTerm<T> pair_term(T score, bool positive) {
  const T clamped = std::clamp(score, static_cast<T>(-kScoreClamp), static_cast<T>(kScoreClamp));
  const T sigma = T(1) / (T(1) + std::exp(-clamped));
  if (positive) return {std::log1p(std::exp(-clamped)), sigma - T(1)};
  return {std::log1p(std::exp(clamped)), sigma};
}

template <std::floating_point T>
T dot(std::span<const T> a, std::span<const T> b) {
  T sum = 0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

template <std::floating_point T>
struct NegativeSamplingResult {
  T loss = 0;
  std::vector<T> grad_entity;
  std::vector<std::vector<T>> grad_words;  // positive first, then negatives
};

/// loss = -ln s(v.u+) - sum ln s(-v.u-), with gradients for every vector.
template <std::floating_point T>
NegativeSamplingResult<T> negative_sampling_loss_and_grad(
    std::span<const T> entity, std::span<const T> positive,
    const std::vector<std::span<const T>>& negatives) {
  NegativeSamplingResult<T> result;
  result.grad_entity.assign(entity.size(), T(0));
  auto add_word = [&](std::span<const T> word, bool is_positive) {
    const PairTerm<T> term = pair_term(dot(entity, word), is_positive);
    result.loss += term.loss;
    std::vector<T> grad_word(entity.size());
    for (std::size_t i = 0; i < entity.size(); ++i) {
      result.grad_entity[i] += term.coefficient * word[i];
      grad_word[i] = term.coefficient * entity[i];
    }
    result.grad_words.push_back(std::move(grad_word));
  };
  add_word(positive, true);
  for (const auto& negative : negatives) add_word(negative, false);
  return result;
}

/// One in-place SGD step on the same objective: every word vector and the
/// entity vector move by -lr * gradient, all gradients taken at the
/// pre-update values. words[0] is the positive word; a word listed twice
/// receives both contributions. `scratch` holds dim values and
/// `coefficients` holds words.size() values. Returns the loss before the step.
template <std::floating_point T>
T negative_sampling_step(std::span<T> entity, std::span<T* const> words, T lr,
                         std::span<T> scratch, std::span<T> coefficients) {
  const std::size_t dim = entity.size();
  T loss = 0;
  for (std::size_t k = 0; k < words.size(); ++k) {
    const std::span<const T> word(words[k], dim);
    const PairTerm<T> term = pair_term(dot(std::span<const T>(entity), word), k == 0);
    loss += term.loss;
    coefficients[k] = term.coefficient;
  }
  std::fill(scratch.begin(), scratch.end(), T(0));
  for (std::size_t k = 0; k < words.size(); ++k) {
    const T* word = words[k];
    for (std::size_t i = 0; i < dim; ++i) scratch[i] += coefficients[k] * word[i];
  }
  for (std::size_t k = 0; k < words.size(); ++k) {
    T* word = words[k];
    for (std::size_t i = 0; i < dim; ++i) word[i] -= lr * coefficients[k] * entity[i];
  }
  for (std::size_t i = 0; i < dim; ++i) entity[i] -= lr * scratch[i];
  return loss;
}

// ---------------------------------------------------------------------------
// Training and persistence
// ---------------------------------------------------------------------------

/// Entity-to-word skipgram with negative sampling. With threads == 1 the
/// result is a pure function of (corpus, cfg).
EmbeddingModel train(const Corpus& corpus, const TrainConfig& cfg, TrainStats* stats = nullptr);

/// Binary format: "ENTV1\0", u32 dim/E/V, entity table, vocab table, E x N
/// and V x N float32 matrices, length-prefixed JSON config. Little-endian.
void save_model(const EmbeddingModel& model, const std::filesystem::path& path);
std::vector<char> serialize_model(const EmbeddingModel& model);
EmbeddingModel load_model(const std::filesystem::path& path);
EmbeddingModel deserialize_model(std::span<const char> bytes);

}  // namespace langinc
