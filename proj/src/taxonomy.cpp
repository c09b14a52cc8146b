#include "langinc/taxonomy.hpp"

#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "langinc/csv.hpp"
#include "langinc/error.hpp"

namespace langinc {

void TaxonomyThresholds::validate() const {
  if (!(0 < l1 && l1 <= l2 && l2 <= l3)) {
    throw DataError("labeled thresholds must satisfy 0 < l1 <= l2 <= l3");
  }
  if (!(0 < u1 && u1 <= u2 && u2 <= u3)) {
    throw DataError("unlabeled thresholds must satisfy 0 < u1 <= u2 <= u3");
  }
}

TaxonomyThresholds TaxonomyThresholds::from_json(std::string_view json_text) {
  nlohmann::json object;
  try {
    object = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("thresholds: malformed JSON: ") + e.what());
  }
  if (!object.is_object()) throw DataError("thresholds: expected a JSON object");
  TaxonomyThresholds t;
  const std::pair<const char*, std::uint64_t*> fields[] = {
      {"l1", &t.l1}, {"l2", &t.l2}, {"l3", &t.l3}, {"u1", &t.u1}, {"u2", &t.u2}, {"u3", &t.u3}};
  for (const auto& [key, target] : fields) {
    const auto it = object.find(key);
    if (it == object.end()) continue;
    if (!it->is_number_unsigned()) {
      throw DataError(std::string("thresholds: '") + key + "' must be a nonnegative integer");
    }
    *target = it->get<std::uint64_t>();
  }
  for (const auto& [key, value] : object.items()) {
    bool known = false;
    for (const auto& field : fields) known = known || key == field.first;
    if (!known) throw DataError("thresholds: unknown key '" + key + "'");
  }
  t.validate();
  return t;
}

TaxonomyThresholds TaxonomyThresholds::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open thresholds " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str());
}

LanguageClass classify_language(std::uint64_t labeled, std::uint64_t unlabeled,
                                const TaxonomyThresholds& t) {
  if (labeled >= t.l3 && unlabeled >= t.u3) return 5;
  if (labeled >= t.l2 && unlabeled >= t.u2) return 4;
  if (labeled < t.l2 && unlabeled >= t.u2) return 3;
  if (labeled >= t.l1 && unlabeled >= t.u1) return 2;
  if (labeled < t.l1 && unlabeled >= t.u1) return 1;
  return 0;
}

std::array<std::size_t, kNumClasses> Taxonomy::class_counts() const {
  std::array<std::size_t, kNumClasses> counts{};
  for (const auto& [id, info] : languages) ++counts[static_cast<std::size_t>(info.language_class)];
  return counts;
}

ClassMap Taxonomy::classes() const {
  ClassMap out;
  for (const auto& [id, info] : languages) out.emplace(id, info.language_class);
  return out;
}

Taxonomy build_taxonomy(const std::vector<LanguageInfo>& rows, const TaxonomyThresholds& t) {
  t.validate();
  Taxonomy taxonomy;
  for (const auto& row : rows) {
    LanguageInfo info = row;
    info.language_class = classify_language(info.labeled_count, info.unlabeled_count, t);
    if (!taxonomy.languages.emplace(info.id, info).second) {
      throw DataError("language '" + info.id + "' listed twice in resources");
    }
  }
  return taxonomy;
}

namespace {

std::uint64_t parse_count(const std::string& field, const std::string& column, std::size_t line) {
  std::int64_t value = 0;
  try {
    value = csv::parse_int(field, column);
  } catch (const DataError& e) {
    throw DataError("resources row at line " + std::to_string(line) + ": " + e.what());
  }
  if (value < 0) {
    throw DataError("resources row at line " + std::to_string(line) + ": negative " + column +
                    " (" + field + ")");
  }
  return static_cast<std::uint64_t>(value);
}

Taxonomy taxonomy_from_table(const csv::Table& table, const TaxonomyThresholds& t) {
  if (table.header.empty()) return build_taxonomy(std::vector<LanguageInfo>{}, t);
  const std::size_t id = table.column("id");
  const std::size_t name = table.column("name");
  const std::size_t labeled = table.column("labeled_count");
  const std::size_t unlabeled = table.column("unlabeled_count");
  const std::size_t speakers = table.column("speakers");
  std::vector<LanguageInfo> rows;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t line = table.lines[r];
    if (row[id].empty()) {
      throw DataError("resources row at line " + std::to_string(line) + ": empty id");
    }
    LanguageInfo info;
    info.id = row[id];
    info.name = row[name];
    info.labeled_count = parse_count(row[labeled], "labeled_count", line);
    info.unlabeled_count = parse_count(row[unlabeled], "unlabeled_count", line);
    info.speakers = parse_count(row[speakers], "speakers", line);
    rows.push_back(std::move(info));
  }
  return build_taxonomy(rows, t);
}

}  // namespace

Taxonomy build_taxonomy(const std::filesystem::path& resources, const TaxonomyThresholds& t) {
  return taxonomy_from_table(csv::read(resources), t);
}

Taxonomy build_taxonomy_from_csv(std::string_view csv_content, const TaxonomyThresholds& t) {
  return taxonomy_from_table(csv::parse(csv_content, "<resources>"), t);
}

void write_resources_csv(const std::vector<LanguageInfo>& rows, std::ostream& out) {
  csv::write_row(out, {"id", "name", "labeled_count", "unlabeled_count", "speakers"});
  for (const auto& row : rows) {
    csv::write_row(out, {row.id, row.name, std::to_string(row.labeled_count),
                         std::to_string(row.unlabeled_count), std::to_string(row.speakers)});
  }
}

LanguageClass class_of(const ClassMap& classes, const std::string& id,
                       std::vector<std::string>* missing) {
  const auto it = classes.find(id);
  if (it != classes.end()) return it->second;
  if (missing != nullptr) missing->push_back(id);
  return 0;
}

// -- Typology ----------------------------------------------------------------

TypologyTable::TypologyTable(std::vector<TypologyRow> rows) : rows_(std::move(rows)) {
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& row : rows_) {
    if (row.category_id.empty()) {
      throw DataError("typology row (" + row.language_id + ", " + row.feature_id +
                      ") has an empty category");
    }
    if (!seen.emplace(row.language_id, row.feature_id).second) {
      throw DataError("typology lists (" + row.language_id + ", " + row.feature_id + ") twice");
    }
  }
}

namespace {

TypologyTable typology_from_table(const csv::Table& table) {
  if (table.header.empty()) return {};
  const std::size_t language = table.column("language_id");
  const std::size_t feature = table.column("feature_id");
  const std::size_t category = table.column("category_id");
  std::vector<TypologyRow> rows;
  rows.reserve(table.rows.size());
  for (const auto& row : table.rows) rows.push_back({row[language], row[feature], row[category]});
  return TypologyTable(std::move(rows));
}

}  // namespace

TypologyTable load_typology(const std::filesystem::path& path) {
  return typology_from_table(csv::read(path));
}

TypologyTable parse_typology(std::string_view csv_content) {
  return typology_from_table(csv::parse(csv_content, "<typology>"));
}

TypologyExclusions typology_exclusions(const TypologyTable& table, const ClassMap& classes) {
  using Category = std::pair<std::string, std::string>;
  std::set<Category> all;
  std::set<Category> low;
  std::set<Category> high;
  TypologyExclusions result;
  for (const auto& row : table.rows()) {
    Category category{row.feature_id, row.category_id};
    all.insert(category);
    const auto it = classes.find(row.language_id);
    if (it == classes.end()) {
      ++result.skipped_rows;
      continue;
    }
    (it->second <= 2 ? low : high).insert(std::move(category));
  }
  for (const auto& category : low) {
    if (high.contains(category)) continue;
    ++result.total_excluded;
    ++result.per_feature[category.first];
  }
  result.universe = all.size();
  return result;
}

}  // namespace langinc
