#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace langinc {

inline constexpr int kMinYear = 1950;
inline constexpr int kMaxYear = 2100;

struct PaperRecord {
  std::string id;
  std::string title;
  std::string abstract;
  std::optional<std::string> body;
  std::string venue;
  int year = 0;
  std::vector<std::string> authors;  // deduplicated, first-occurrence order
  std::set<std::string> languages;
  // True once languages were supplied by the file or set by detection.
  bool languages_annotated = false;

  bool operator==(const PaperRecord&) const = default;
};

/// Immutable once built. venues/years are always the projections of papers.
class Corpus {
 public:
  Corpus() = default;
  /// Validates ids (nonempty, unique) and years; dedups authors.
  explicit Corpus(std::vector<PaperRecord> papers);

  const std::vector<PaperRecord>& papers() const { return papers_; }
  const std::set<std::string>& venues() const { return venues_; }
  const std::set<int>& years() const { return years_; }
  std::size_t size() const { return papers_.size(); }
  bool empty() const { return papers_.empty(); }

  bool operator==(const Corpus& other) const { return papers_ == other.papers_; }

 private:
  std::vector<PaperRecord> papers_;
  std::set<std::string> venues_;
  std::set<int> years_;
};

/// Canonical language id -> surface aliases. Every alias belongs to exactly
/// one id; the canonical name is always one of its own aliases.
class Gazetteer {
 public:
  /// Registers an id with its canonical name plus extra aliases. Throws
  /// DataError on an alias claimed by two ids, an empty alias, or a repeated id.
  void add(const std::string& id, const std::string& canonical_name,
           const std::vector<std::string>& aliases = {});

  /// Aliases per id; the canonical name comes first.
  const std::map<std::string, std::vector<std::string>>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::set<std::string> ids() const;
  std::optional<std::string> id_for_alias(const std::string& alias) const;

 private:
  std::map<std::string, std::vector<std::string>> entries_;
  std::map<std::string, std::string> alias_owner_;
};

/// Which text fields language detection looks at.
struct FieldSelector {
  bool title = true;
  bool abstract = true;
  bool body = false;

  /// Parses a comma-separated list such as "title,abstract,body".
  static FieldSelector parse(std::string_view list);
};

/// Case-sensitive whole-word alias matcher. Multi-word aliases match as
/// contiguous letter-token sequences.
class LanguageDetector {
 public:
  explicit LanguageDetector(const Gazetteer& gazetteer);

  std::set<std::string> detect(std::string_view text) const;
  std::set<std::string> detect(const PaperRecord& paper, FieldSelector fields) const;

 private:
  struct Pattern {
    std::vector<std::string> tokens;
    std::string id;
  };
  // Patterns keyed by their first token.
  std::map<std::string, std::vector<Pattern>, std::less<>> by_first_token_;
};

Corpus load_corpus(const std::filesystem::path& path);
Corpus parse_corpus(std::istream& in, std::string_view source_name = "<stream>");
Gazetteer load_gazetteer(const std::filesystem::path& path);
Gazetteer parse_gazetteer(std::istream& in, std::string_view source_name = "<stream>");

std::set<std::string> detect_languages(const PaperRecord& paper, const Gazetteer& gazetteer,
                                       FieldSelector fields = {});

/// Fills languages for papers that are not already annotated. Papers with
/// languages supplied on input are left alone.
Corpus annotate(const Corpus& corpus, const Gazetteer& gazetteer, FieldSelector fields = {});

/// One JSON object per line; load_corpus reads it back unchanged.
void write_corpus(const Corpus& corpus, std::ostream& out);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);
void write_gazetteer(const Gazetteer& gazetteer, std::ostream& out);

}  // namespace langinc
