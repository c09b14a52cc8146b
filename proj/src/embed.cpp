#include "langinc/embed.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "langinc/error.hpp"
#include "langinc/random.hpp"
#include "langinc/text.hpp"

namespace langinc {

std::string_view to_string(EntityKind kind) {
  switch (kind) {
    case EntityKind::Author: return "author";
    case EntityKind::Language: return "language";
    case EntityKind::Venue: return "venue";
    case EntityKind::VenueIteration: return "venue_iteration";
  }
  return "unknown";
}

std::optional<EntityKind> parse_entity_kind(std::string_view name) {
  for (auto kind : {EntityKind::Author, EntityKind::Language, EntityKind::Venue,
                    EntityKind::VenueIteration}) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

std::string venue_iteration_key(std::string_view venue, int year) {
  return std::string(venue) + "_" + std::to_string(year);
}

// -- Vocabulary and entities -------------------------------------------------

std::optional<std::uint32_t> Vocab::find(std::string_view word) const {
  const auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void Vocab::rebuild_index() {
  index_.clear();
  for (std::size_t i = 0; i < words.size(); ++i) {
    index_.emplace(words[i], static_cast<std::uint32_t>(i));
  }
}

std::vector<std::string> paper_tokens(const PaperRecord& paper) {
  auto tokens = text::word_tokens(paper.title);
  auto rest = text::word_tokens(paper.abstract);
  tokens.insert(tokens.end(), std::make_move_iterator(rest.begin()),
                std::make_move_iterator(rest.end()));
  return tokens;
}

Vocab build_vocab(const Corpus& corpus, std::uint64_t min_count) {
  std::map<std::string, std::uint64_t> counts;
  for (const auto& paper : corpus.papers()) {
    for (auto& token : paper_tokens(paper)) ++counts[std::move(token)];
  }
  std::vector<std::pair<std::string, std::uint64_t>> kept;
  for (auto& [word, count] : counts) {
    if (count >= min_count) kept.emplace_back(word, count);
  }
  if (kept.empty()) {
    throw DataError("empty vocabulary: no token occurs at least " + std::to_string(min_count) +
                    " times; lower --min-count");
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  Vocab vocab;
  vocab.min_count = min_count;
  for (auto& [word, count] : kept) {
    vocab.words.push_back(std::move(word));
    vocab.counts.push_back(count);
  }
  vocab.rebuild_index();
  return vocab;
}

std::vector<EntityId> paper_entities(const PaperRecord& paper) {
  std::vector<EntityId> out;
  for (const auto& author : paper.authors) out.push_back({EntityKind::Author, author});
  for (const auto& language : paper.languages) out.push_back({EntityKind::Language, language});
  out.push_back({EntityKind::Venue, paper.venue});
  out.push_back({EntityKind::VenueIteration, venue_iteration_key(paper.venue, paper.year)});
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<EntityId> collect_entities(const Corpus& corpus) {
  std::vector<EntityId> all;
  for (const auto& paper : corpus.papers()) {
    auto ids = paper_entities(paper);
    all.insert(all.end(), std::make_move_iterator(ids.begin()), std::make_move_iterator(ids.end()));
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return all;
}

void TrainConfig::validate() const {
  if (dim < 2) throw DataError("dim must be at least 2");
  if (epochs == 0) throw DataError("epochs must be positive");
  if (k_words == 0) throw DataError("k-words must be positive");
  if (negatives == 0) throw DataError("negatives must be positive");
  if (min_count == 0) throw DataError("min-count must be positive");
  if (threads == 0) throw DataError("threads must be positive");
  if (!(initial_lr > 0.0) || !(final_lr > 0.0) || final_lr > initial_lr) {
    throw DataError("learning rates must satisfy 0 < final_lr <= initial_lr");
  }
  if (subsample < 0.0) throw DataError("subsample must be nonnegative");
}

std::optional<std::size_t> EmbeddingModel::find_entity(const EntityId& id) const {
  const auto it = std::lower_bound(entities.begin(), entities.end(), id);
  if (it == entities.end() || *it != id) return std::nullopt;
  return static_cast<std::size_t>(it - entities.begin());
}

std::vector<std::size_t> EmbeddingModel::entities_of_kind(EntityKind kind) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < entities.size(); ++i) {
    if (entities[i].kind == kind) out.push_back(i);
  }
  return out;
}

namespace {

bool same_bits(const std::vector<float>& a, const std::vector<float>& b) {
  return a.size() == b.size() &&
         (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0);
}

}  // namespace

bool EmbeddingModel::operator==(const EmbeddingModel& other) const {
  return dim == other.dim && entities == other.entities && vocab == other.vocab &&
         config == other.config && same_bits(entity_vectors, other.entity_vectors) &&
         same_bits(word_vectors, other.word_vectors);
}

// -- Training ----------------------------------------------------------------

namespace {

struct TrainingPaper {
  std::vector<std::uint32_t> tokens;
  std::vector<std::uint32_t> entities;
};

class NoiseSampler {
 public:
  explicit NoiseSampler(const std::vector<std::uint64_t>& counts) {
    cumulative_.reserve(counts.size());
    double total = 0.0;
    for (const auto count : counts) {
      total += std::pow(static_cast<double>(count), 0.75);
      cumulative_.push_back(total);
    }
  }

  std::uint32_t draw(Rng& rng) const {
    const double target = rng.uniform() * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
    const auto index = static_cast<std::size_t>(it - cumulative_.begin());
    return static_cast<std::uint32_t>(std::min(index, cumulative_.size() - 1));
  }

 private:
  std::vector<double> cumulative_;
};

struct EpochWork {
  double loss = 0.0;
  std::uint64_t updates = 0;
};

class Trainer {
 public:
  Trainer(const TrainConfig& cfg, EmbeddingModel& model, const std::vector<TrainingPaper>& papers,
          std::uint64_t scheduled_updates)
      : cfg_(cfg),
        model_(model),
        papers_(papers),
        noise_(model.vocab.counts),
        scheduled_(static_cast<double>(scheduled_updates)) {
    if (cfg.subsample > 0.0) {
      const double total = static_cast<double>(
          std::accumulate(model.vocab.counts.begin(), model.vocab.counts.end(), std::uint64_t{0}));
      for (const auto count : model.vocab.counts) {
        const double ratio = cfg.subsample * total / static_cast<double>(count);
        keep_probability_.push_back(std::min(1.0, std::sqrt(ratio) + ratio));
      }
    }
  }

  // Processes the papers at positions [begin, end) with stride `stride` of
  // `order`. `done_before` and `progress_scale` place this worker on the
  // global learning-rate schedule.
  EpochWork run(const std::vector<std::size_t>& order, std::size_t begin, std::size_t stride,
                Rng& rng, std::uint64_t done_before, double progress_scale) {
    const std::uint32_t dim = model_.dim;
    std::vector<float> scratch(dim);
    std::vector<float> coefficients(cfg_.negatives + 1);
    std::vector<float*> words;
    words.reserve(cfg_.negatives + 1);
    EpochWork work;
    for (std::size_t position = begin; position < order.size(); position += stride) {
      const TrainingPaper& paper = papers_[order[position]];
      if (paper.tokens.empty()) continue;
      for (const std::uint32_t entity : paper.entities) {
        float* entity_row = model_.entity_vectors.data() + static_cast<std::size_t>(entity) * dim;
        for (std::uint32_t k = 0; k < cfg_.k_words; ++k) {
          const double progress =
              (static_cast<double>(done_before) + progress_scale * static_cast<double>(work.updates)) /
              scheduled_;
          const double lr = std::max(cfg_.final_lr,
                                     cfg_.initial_lr - (cfg_.initial_lr - cfg_.final_lr) * progress);
          const std::uint32_t target = paper.tokens[rng.index(paper.tokens.size())];
          if (!keep_probability_.empty() && !rng.bernoulli(keep_probability_[target])) {
            ++work.updates;
            continue;
          }
          words.clear();
          words.push_back(word_row(target));
          for (std::uint32_t n = 0; n < cfg_.negatives; ++n) {
            const std::uint32_t noise = noise_.draw(rng);
            if (noise != target) words.push_back(word_row(noise));
          }
          work.loss += negative_sampling_step<float>(
              std::span<float>(entity_row, dim), std::span<float* const>(words),
              static_cast<float>(lr), std::span<float>(scratch),
              std::span<float>(coefficients.data(), words.size()));
          ++work.updates;
        }
      }
    }
    return work;
  }

 private:
  float* word_row(std::uint32_t word) {
    return model_.word_vectors.data() + static_cast<std::size_t>(word) * model_.dim;
  }

  const TrainConfig& cfg_;
  EmbeddingModel& model_;
  const std::vector<TrainingPaper>& papers_;
  NoiseSampler noise_;
  std::vector<double> keep_probability_;
  double scheduled_;
};

}  // namespace

EmbeddingModel train(const Corpus& corpus, const TrainConfig& cfg, TrainStats* stats) {
  cfg.validate();
  EmbeddingModel model;
  model.dim = cfg.dim;
  model.config = cfg;
  model.vocab = build_vocab(corpus, cfg.min_count);
  model.entities = collect_entities(corpus);
  if (model.entities.empty()) throw DataError("no entities to train");

  TrainStats local_stats;
  std::vector<TrainingPaper> papers;
  papers.reserve(corpus.size());
  std::uint64_t updates_per_epoch = 0;
  for (const auto& paper : corpus.papers()) {
    TrainingPaper entry;
    for (const auto& token : paper_tokens(paper)) {
      if (const auto index = model.vocab.find(token)) entry.tokens.push_back(*index);
    }
    if (entry.tokens.empty()) {
      ++local_stats.skipped_papers;
    } else {
      for (const auto& id : paper_entities(paper)) {
        entry.entities.push_back(static_cast<std::uint32_t>(*model.find_entity(id)));
      }
      updates_per_epoch += entry.entities.size() * cfg.k_words;
    }
    papers.push_back(std::move(entry));
  }
  if (updates_per_epoch == 0) {
    throw DataError("every paper was skipped: no paper has an in-vocabulary token");
  }

  Rng rng(cfg.seed);
  const std::size_t dim = cfg.dim;
  model.entity_vectors.resize(model.entities.size() * dim);
  const double half_width = 0.5 / static_cast<double>(dim);
  for (auto& value : model.entity_vectors) {
    value = static_cast<float>(rng.uniform(-half_width, half_width));
  }
  model.word_vectors.assign(model.vocab.size() * dim, 0.0f);

  const std::uint64_t scheduled = updates_per_epoch * cfg.epochs;
  Trainer trainer(cfg, model, papers, scheduled);
  std::vector<std::size_t> order(papers.size());
  std::uint64_t done = 0;
  for (std::uint32_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(order));
    EpochWork total;
    if (cfg.threads == 1) {
      total = trainer.run(order, 0, 1, rng, done, 1.0);
    } else {
      // Lock-free shared updates; results depend on scheduling.
      std::vector<EpochWork> results(cfg.threads);
      std::vector<std::thread> workers;
      for (std::uint32_t t = 0; t < cfg.threads; ++t) {
        workers.emplace_back([&, t] {
          Rng worker_rng(cfg.seed ^ (0x9E3779B97F4A7C15ULL * (epoch * cfg.threads + t + 1)));
          results[t] = trainer.run(order, t, cfg.threads, worker_rng, done,
                                   static_cast<double>(cfg.threads));
        });
      }
      for (auto& worker : workers) worker.join();
      for (const auto& part : results) {
        total.loss += part.loss;
        total.updates += part.updates;
      }
    }
    done += total.updates;
    local_stats.updates += total.updates;
    local_stats.epoch_mean_loss.push_back(
        total.updates > 0 ? total.loss / static_cast<double>(total.updates) : 0.0);
  }
  if (stats != nullptr) *stats = std::move(local_stats);
  return model;
}

// -- Persistence -------------------------------------------------------------

namespace {

constexpr std::array<char, 6> kMagic = {'E', 'N', 'T', 'V', '1', '\0'};

class ByteWriter {
 public:
  void raw(const char* data, std::size_t size) { bytes_.insert(bytes_.end(), data, data + size); }
  void u8(std::uint8_t value) { bytes_.push_back(static_cast<char>(value)); }
  void u32(std::uint32_t value) {
    for (int shift = 0; shift < 32; shift += 8) u8(static_cast<std::uint8_t>(value >> shift));
  }
  void u64(std::uint64_t value) {
    for (int shift = 0; shift < 64; shift += 8) u8(static_cast<std::uint8_t>(value >> shift));
  }
  void f32(float value) { u32(std::bit_cast<std::uint32_t>(value)); }
  void string(std::string_view value) {
    u32(static_cast<std::uint32_t>(value.size()));
    raw(value.data(), value.size());
  }
  std::vector<char> take() { return std::move(bytes_); }

 private:
  std::vector<char> bytes_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const char> bytes) : bytes_(bytes) {}

  void need(std::size_t count, std::string_view what) const {
    const std::size_t available = bytes_.size() - offset_;
    if (count > available) {
      throw DataError("truncated model file: " + std::string(what) + " needs " +
                      std::to_string(count) + " bytes at offset " + std::to_string(offset_) +
                      ", only " + std::to_string(available) + " available");
    }
  }
  std::uint8_t u8(std::string_view what) {
    need(1, what);
    return static_cast<std::uint8_t>(bytes_[offset_++]);
  }
  std::uint32_t u32(std::string_view what) {
    need(4, what);
    std::uint32_t value = 0;
    for (int shift = 0; shift < 32; shift += 8) {
      value |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(bytes_[offset_++])) << shift;
    }
    return value;
  }
  std::uint64_t u64(std::string_view what) {
    need(8, what);
    std::uint64_t value = 0;
    for (int shift = 0; shift < 64; shift += 8) {
      value |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(bytes_[offset_++])) << shift;
    }
    return value;
  }
  std::string string(std::string_view what) {
    const std::uint32_t length = u32(what);
    need(length, what);
    std::string value(bytes_.data() + offset_, length);
    offset_ += length;
    return value;
  }
  void floats(std::vector<float>& out, std::size_t count, std::string_view what) {
    need(count * 4, what);
    out.resize(count);
    for (auto& value : out) {
      std::uint32_t raw = 0;
      for (int shift = 0; shift < 32; shift += 8) {
        raw |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(bytes_[offset_++])) << shift;
      }
      value = std::bit_cast<float>(raw);
    }
  }
  std::span<const char> take(std::size_t count, std::string_view what) {
    need(count, what);
    const auto out = bytes_.subspan(offset_, count);
    offset_ += count;
    return out;
  }
  std::size_t remaining() const { return bytes_.size() - offset_; }

 private:
  std::span<const char> bytes_;
  std::size_t offset_ = 0;
};

nlohmann::json config_to_json(const TrainConfig& cfg) {
  return {{"dim", cfg.dim},
          {"epochs", cfg.epochs},
          {"k_words", cfg.k_words},
          {"negatives", cfg.negatives},
          {"initial_lr", cfg.initial_lr},
          {"final_lr", cfg.final_lr},
          {"min_count", cfg.min_count},
          {"subsample", cfg.subsample},
          {"seed", cfg.seed},
          {"threads", cfg.threads}};
}

TrainConfig config_from_json(const std::string& text) {
  try {
    const auto object = nlohmann::json::parse(text);
    TrainConfig cfg;
    cfg.dim = object.at("dim").get<std::uint32_t>();
    cfg.epochs = object.at("epochs").get<std::uint32_t>();
    cfg.k_words = object.at("k_words").get<std::uint32_t>();
    cfg.negatives = object.at("negatives").get<std::uint32_t>();
    cfg.initial_lr = object.at("initial_lr").get<double>();
    cfg.final_lr = object.at("final_lr").get<double>();
    cfg.min_count = object.at("min_count").get<std::uint64_t>();
    cfg.subsample = object.at("subsample").get<double>();
    cfg.seed = object.at("seed").get<std::uint64_t>();
    cfg.threads = object.at("threads").get<std::uint32_t>();
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad config block in model file: ") + e.what());
  }
}

}  // namespace

std::vector<char> serialize_model(const EmbeddingModel& model) {
  const std::size_t dim = model.dim;
  if (model.entity_vectors.size() != model.entities.size() * dim ||
      model.word_vectors.size() != model.vocab.size() * dim) {
    throw DataError("dimension mismatch: matrices do not match the entity/vocab tables");
  }
  ByteWriter out;
  out.raw(kMagic.data(), kMagic.size());
  out.u32(model.dim);
  out.u32(static_cast<std::uint32_t>(model.entities.size()));
  out.u32(static_cast<std::uint32_t>(model.vocab.size()));
  for (const auto& entity : model.entities) {
    out.u8(static_cast<std::uint8_t>(entity.kind));
    out.string(entity.key);
  }
  for (std::size_t i = 0; i < model.vocab.size(); ++i) {
    out.string(model.vocab.words[i]);
    out.u64(model.vocab.counts[i]);
  }
  for (const float value : model.entity_vectors) out.f32(value);
  for (const float value : model.word_vectors) out.f32(value);
  out.string(config_to_json(model.config).dump());
  return out.take();
}

void save_model(const EmbeddingModel& model, const std::filesystem::path& path) {
  const auto bytes = serialize_model(model);
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw DataError("cannot write model " + path.string());
  file.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!file) throw DataError("write failed for " + path.string());
}

EmbeddingModel deserialize_model(std::span<const char> bytes) {
  ByteReader in(bytes);
  if (bytes.size() < kMagic.size() ||
      !std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw DataError("bad magic: not an entity-embedding model file");
  }
  in.take(kMagic.size(), "magic");
  EmbeddingModel model;
  model.dim = in.u32("dim");
  const std::uint32_t entity_count = in.u32("entity count");
  const std::uint32_t vocab_size = in.u32("vocab size");
  if (model.dim < 2) throw DataError("dimension mismatch: dim " + std::to_string(model.dim));

  model.entities.reserve(entity_count);
  for (std::uint32_t i = 0; i < entity_count; ++i) {
    const std::uint8_t kind = in.u8("entity kind");
    if (kind > 3) throw DataError("bad entity kind byte " + std::to_string(kind));
    model.entities.push_back({static_cast<EntityKind>(kind), in.string("entity key")});
  }
  if (!std::is_sorted(model.entities.begin(), model.entities.end())) {
    throw DataError("entity table is not in (kind, key) order");
  }
  for (std::uint32_t i = 0; i < vocab_size; ++i) {
    model.vocab.words.push_back(in.string("vocab word"));
    model.vocab.counts.push_back(in.u64("vocab count"));
  }
  const std::size_t dim = model.dim;
  in.floats(model.entity_vectors, static_cast<std::size_t>(entity_count) * dim, "entity matrix");
  in.floats(model.word_vectors, static_cast<std::size_t>(vocab_size) * dim, "word matrix");
  model.config = config_from_json(in.string("config block"));
  if (model.config.dim != model.dim) {
    throw DataError("dimension mismatch: header dim " + std::to_string(model.dim) +
                    ", config dim " + std::to_string(model.config.dim));
  }
  if (in.remaining() != 0) {
    throw DataError(std::to_string(in.remaining()) + " trailing bytes after model config");
  }
  model.vocab.min_count = model.config.min_count;
  model.vocab.rebuild_index();
  return model;
}

EmbeddingModel load_model(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw DataError("cannot open model " + path.string());
  const std::vector<char> bytes((std::istreambuf_iterator<char>(file)),
                                std::istreambuf_iterator<char>());
  return deserialize_model(bytes);
}

}  // namespace langinc
