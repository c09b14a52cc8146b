#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace langinc {

inline constexpr int kNumClasses = 6;

/// Resource-availability class, 0 (least resourced) to 5 (most).
using LanguageClass = int;

/// language id -> class
using ClassMap = std::map<std::string, LanguageClass>;

struct LanguageInfo {
  std::string id;
  std::string name;
  std::uint64_t labeled_count = 0;
  std::uint64_t unlabeled_count = 0;
  std::uint64_t speakers = 0;
  LanguageClass language_class = 0;
};

/// Cut points on the labeled and unlabeled resource axes.
struct TaxonomyThresholds {
  std::uint64_t l1 = 1;
  std::uint64_t l2 = 10;
  std::uint64_t l3 = 100;
  std::uint64_t u1 = 100;
  std::uint64_t u2 = 10'000;
  std::uint64_t u3 = 100'000;

  /// Throws DataError unless 0 < l1 <= l2 <= l3 and 0 < u1 <= u2 <= u3.
  void validate() const;

  /// Reads {"l1":..,"l2":..,"l3":..,"u1":..,"u2":..,"u3":..}; missing keys
  /// keep their defaults.
  static TaxonomyThresholds from_json(std::string_view json_text);
  static TaxonomyThresholds load(const std::filesystem::path& path);
};

/// Ordered decision list; the first matching rule wins:
///   5: labeled >= l3 && unlabeled >= u3
///   4: labeled >= l2 && unlabeled >= u2
///   3: labeled <  l2 && unlabeled >= u2
///   2: labeled >= l1 && unlabeled >= u1
///   1: labeled <  l1 && unlabeled >= u1
///   0: otherwise
LanguageClass classify_language(std::uint64_t labeled, std::uint64_t unlabeled,
                                const TaxonomyThresholds& thresholds = {});

struct Taxonomy {
  std::map<std::string, LanguageInfo> languages;

  std::array<std::size_t, kNumClasses> class_counts() const;
  ClassMap classes() const;
};

/// Resource CSV with header id,name,labeled_count,unlabeled_count,speakers.
/// Negative or non-numeric counts are a DataError naming the row.
Taxonomy build_taxonomy(const std::filesystem::path& resources,
                        const TaxonomyThresholds& thresholds = {});
Taxonomy build_taxonomy_from_csv(std::string_view csv_content,
                                 const TaxonomyThresholds& thresholds = {});
Taxonomy build_taxonomy(const std::vector<LanguageInfo>& rows,
                        const TaxonomyThresholds& thresholds = {});

void write_resources_csv(const std::vector<LanguageInfo>& rows, std::ostream& out);

/// Class of a language, falling back to 0 for ids missing from the map.
/// When `missing` is given, unknown ids are recorded there.
LanguageClass class_of(const ClassMap& classes, const std::string& id,
                       std::vector<std::string>* missing = nullptr);

struct TypologyRow {
  std::string language_id;
  std::string feature_id;
  std::string category_id;
};

/// (language, feature) pairs are unique; categories nonempty.
class TypologyTable {
 public:
  TypologyTable() = default;
  explicit TypologyTable(std::vector<TypologyRow> rows);

  const std::vector<TypologyRow>& rows() const { return rows_; }

 private:
  std::vector<TypologyRow> rows_;
};

/// CSV with header language_id,feature_id,category_id.
TypologyTable load_typology(const std::filesystem::path& path);
TypologyTable parse_typology(std::string_view csv_content);

struct TypologyExclusions {
  std::size_t total_excluded = 0;
  std::map<std::string, std::size_t> per_feature;
  std::size_t universe = 0;       // unique (feature, category) pairs, all rows
  std::size_t skipped_rows = 0;   // rows whose language has no class
};

/// Counts (feature, category) pairs attested among classes 0-2 and absent
/// from every class 3-5 language.
TypologyExclusions typology_exclusions(const TypologyTable& table, const ClassMap& classes);

}  // namespace langinc
