#include "langinc/report.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "langinc/csv.hpp"
#include "langinc/error.hpp"

namespace langinc::report {
namespace {

using nlohmann::json;
using csv::format_double;

json number_or_null(double value) {
  if (std::isfinite(value)) return value;
  return nullptr;
}

void dump(const json& value, std::ostream& out) { out << value.dump(2) << '\n'; }

void require_tabular(Format format) {
  if (format == Format::Svg) throw UsageError("svg output is only available for projections");
}

std::string fixed(double value, int digits) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*f", digits, value);
  return buffer;
}

std::string xml_escape(std::string_view text) {
  std::string out;
  for (const char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

constexpr std::array<const char*, kNumClasses> kClassColors = {
    "#440154", "#414487", "#2a788e", "#22a884", "#7ad151", "#fde725"};
constexpr const char* kAuthorColor = "#b0b0b0";
constexpr const char* kVenueColor = "#d62728";
constexpr const char* kIterationColor = "#ff9896";
constexpr const char* kUnclassifiedColor = "#000000";

std::string point_color(const EntityId& id, const ClassMap* classes) {
  switch (id.kind) {
    case EntityKind::Author: return kAuthorColor;
    case EntityKind::Venue: return kVenueColor;
    case EntityKind::VenueIteration: return kIterationColor;
    case EntityKind::Language: {
      if (classes == nullptr) return kUnclassifiedColor;
      const auto it = classes->find(id.key);
      if (it == classes->end()) return kUnclassifiedColor;
      return kClassColors[static_cast<std::size_t>(it->second)];
    }
  }
  return kUnclassifiedColor;
}

}  // namespace

Format parse_format(const std::string& name) {
  if (name == "csv") return Format::Csv;
  if (name == "json") return Format::Json;
  if (name == "svg") return Format::Svg;
  throw UsageError("unknown format '" + name + "' (expected csv, json or svg)");
}

json to_json(const std::vector<EntropyResult>& rows) {
  json out = json::array();
  for (const auto& row : rows) {
    out.push_back({{"venue", row.venue},
                   {"year", row.year},
                   {"papers", row.papers},
                   {"languages", row.languages_mentioned},
                   {"entropy", row.entropy}});
  }
  return out;
}

void write_entropy(const std::vector<EntropyResult>& rows, Format format, std::ostream& out) {
  require_tabular(format);
  if (format == Format::Json) return dump(to_json(rows), out);
  csv::write_row(out, {"venue", "year", "papers", "languages", "entropy"});
  for (const auto& row : rows) {
    csv::write_row(out, {row.venue, std::to_string(row.year), std::to_string(row.papers),
                         std::to_string(row.languages_mentioned), format_double(row.entropy)});
  }
}

json to_json(const std::vector<MrrTable>& tables) {
  json out = json::array();
  for (const auto& table : tables) {
    for (const auto& [cls, entry] : table.per_class) {
      out.push_back({{"venue", table.venue},
                     {"class", cls},
                     {"mrr", entry.mrr},
                     {"inverse_mrr", number_or_null(entry.inverse_mrr)},
                     {"queries", entry.queries}});
    }
  }
  return out;
}

void write_mrr(const std::vector<MrrTable>& tables, Format format, std::ostream& out) {
  require_tabular(format);
  if (format == Format::Json) return dump(to_json(tables), out);
  csv::write_row(out, {"venue", "class", "mrr", "inverse_mrr"});
  for (const auto& table : tables) {
    for (const auto& [cls, entry] : table.per_class) {
      csv::write_row(out, {table.venue, std::to_string(cls), format_double(entry.mrr),
                           format_double(entry.inverse_mrr)});
    }
  }
}

void write_taxonomy(const Taxonomy& taxonomy, Format format, std::ostream& out) {
  require_tabular(format);
  if (format == Format::Json) {
    json languages = json::array();
    for (const auto& [id, info] : taxonomy.languages) {
      languages.push_back({{"id", id},
                           {"name", info.name},
                           {"labeled_count", info.labeled_count},
                           {"unlabeled_count", info.unlabeled_count},
                           {"speakers", info.speakers},
                           {"class", info.language_class}});
    }
    const auto counts = taxonomy.class_counts();
    return dump({{"languages", languages}, {"class_counts", counts}}, out);
  }
  csv::write_row(out, {"id", "name", "labeled_count", "unlabeled_count", "speakers", "class"});
  for (const auto& [id, info] : taxonomy.languages) {
    csv::write_row(out, {id, info.name, std::to_string(info.labeled_count),
                         std::to_string(info.unlabeled_count), std::to_string(info.speakers),
                         std::to_string(info.language_class)});
  }
}

void write_typology(const TypologyExclusions& result, Format format, std::ostream& out) {
  require_tabular(format);
  if (format == Format::Json) {
    return dump({{"total_excluded", result.total_excluded},
                 {"universe", result.universe},
                 {"skipped_rows", result.skipped_rows},
                 {"per_feature", result.per_feature}},
                out);
  }
  csv::write_row(out, {"scope", "id", "count"});
  csv::write_row(out, {"total", "excluded", std::to_string(result.total_excluded)});
  csv::write_row(out, {"total", "universe", std::to_string(result.universe)});
  csv::write_row(out, {"total", "skipped_rows", std::to_string(result.skipped_rows)});
  for (const auto& [feature, count] : result.per_feature) {
    csv::write_row(out, {"feature", feature, std::to_string(count)});
  }
}

json to_json(const DistanceTable& table) {
  json out = json::array();
  for (const auto& venue : table.venues) {
    for (const auto& [cls, distance] : table.values.at(venue)) {
      out.push_back({{"venue", venue}, {"class", cls}, {"distance", distance}});
    }
  }
  return out;
}

void write_distances(const DistanceTable& table, Format format, std::ostream& out) {
  require_tabular(format);
  if (format == Format::Json) return dump(to_json(table), out);
  csv::write_row(out, {"venue", "class", "distance"});
  for (const auto& venue : table.venues) {
    for (const auto& [cls, distance] : table.values.at(venue)) {
      csv::write_row(out, {venue, std::to_string(cls), format_double(distance)});
    }
  }
}

json to_json(const LalMrrTable& table) {
  json classes = json::array();
  for (const auto& [cls, by_k] : table.per_class) {
    for (const auto& [k, value] : by_k) classes.push_back({{"class", cls}, {"k", k}, {"mrr", value}});
  }
  json languages = json::array();
  for (const auto& [id, by_k] : table.per_language) {
    for (const auto& [k, value] : by_k) languages.push_back({{"language", id}, {"k", k}, {"mrr", value}});
  }
  return {{"m", table.m}, {"ks", table.ks}, {"classes", classes}, {"languages", languages}};
}

void write_lal_mrr(const LalMrrTable& table, Format format, std::ostream& out) {
  require_tabular(format);
  if (format == Format::Json) return dump(to_json(table), out);
  csv::write_row(out, {"scope", "id", "k", "m", "mrr"});
  const std::string m = std::to_string(table.m);
  for (const auto& [cls, by_k] : table.per_class) {
    for (const auto& [k, value] : by_k) {
      csv::write_row(out, {"class", std::to_string(cls), std::to_string(k), m, format_double(value)});
    }
  }
  for (const auto& [id, by_k] : table.per_language) {
    for (const auto& [k, value] : by_k) {
      csv::write_row(out, {"language", id, std::to_string(k), m, format_double(value)});
    }
  }
}

json to_json(const RegressionEval& eval) {
  return {{"r2", eval.r2 ? json(*eval.r2) : json(nullptr)},
          {"r2_defined", eval.r2.has_value()},
          {"mae", eval.mae},
          {"train_size", eval.train_size},
          {"test_size", eval.test_size},
          {"oov_excluded", eval.oov_excluded},
          {"split_seed", eval.split_seed},
          {"train_fraction", eval.train_fraction}};
}

void write_regression(const RegressionEval& eval, Format format, std::ostream& out) {
  require_tabular(format);
  if (format == Format::Json) return dump(to_json(eval), out);
  csv::write_row(out, {"r2", "r2_defined", "mae", "train_size", "test_size", "oov_excluded",
                       "split_seed", "train_fraction"});
  csv::write_row(out, {eval.r2 ? format_double(*eval.r2) : "nan", eval.r2 ? "true" : "false",
                       format_double(eval.mae), std::to_string(eval.train_size),
                       std::to_string(eval.test_size), std::to_string(eval.oov_excluded),
                       std::to_string(eval.split_seed), format_double(eval.train_fraction)});
}

void write_projection_csv(const Projection2D& projection, std::ostream& out) {
  csv::write_row(out, {"kind", "key", "x", "y"});
  for (std::size_t i = 0; i < projection.size(); ++i) {
    csv::write_row(out, {std::string(to_string(projection.labels[i].kind)), projection.labels[i].key,
                         format_double(projection.coords[2 * i]),
                         format_double(projection.coords[2 * i + 1])});
  }
}

std::string svg_scatter(const Projection2D& projection, const ClassMap* classes) {
  if (projection.size() == 0) throw DataError("cannot plot an empty projection");
  constexpr double kWidth = 800.0;
  constexpr double kHeight = 600.0;
  constexpr double kMargin = 40.0;
  constexpr double kLegendWidth = 170.0;

  double min_x = projection.coords[0];
  double max_x = min_x;
  double min_y = projection.coords[1];
  double max_y = min_y;
  for (std::size_t i = 0; i < projection.size(); ++i) {
    min_x = std::min(min_x, projection.coords[2 * i]);
    max_x = std::max(max_x, projection.coords[2 * i]);
    min_y = std::min(min_y, projection.coords[2 * i + 1]);
    max_y = std::max(max_y, projection.coords[2 * i + 1]);
  }
  const double span_x = max_x > min_x ? max_x - min_x : 1.0;
  const double span_y = max_y > min_y ? max_y - min_y : 1.0;
  const double plot_width = kWidth - kLegendWidth - 2 * kMargin;
  const double plot_height = kHeight - 2 * kMargin;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(kWidth, 0) << "\" height=\""
      << fixed(kHeight, 0) << "\" viewBox=\"0 0 " << fixed(kWidth, 0) << ' ' << fixed(kHeight, 0)
      << "\" font-family=\"sans-serif\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << fixed(kWidth, 0) << "\" height=\"" << fixed(kHeight, 0)
      << "\" fill=\"#ffffff\"/>\n";
  svg << "<g id=\"points\">\n";
  std::ostringstream labels;
  for (std::size_t i = 0; i < projection.size(); ++i) {
    const auto& id = projection.labels[i];
    const double x = kMargin + (projection.coords[2 * i] - min_x) / span_x * plot_width;
    const double y = kHeight - kMargin - (projection.coords[2 * i + 1] - min_y) / span_y * plot_height;
    svg << "<circle cx=\"" << fixed(x, 2) << "\" cy=\"" << fixed(y, 2) << "\" r=\"4\" fill=\""
        << point_color(id, classes) << "\"><title>" << to_string(id.kind) << ':'
        << xml_escape(id.key) << "</title></circle>\n";
    if (id.kind == EntityKind::Venue) {
      labels << "<text x=\"" << fixed(x + 6, 2) << "\" y=\"" << fixed(y - 6, 2)
             << "\" font-size=\"12\">" << xml_escape(id.key) << "</text>\n";
    }
  }
  svg << "</g>\n<g id=\"labels\">\n" << labels.str() << "</g>\n";

  svg << "<g id=\"legend\">\n";
  std::vector<std::pair<std::string, std::string>> legend = {
      {"author", kAuthorColor}, {"venue", kVenueColor}, {"venue iteration", kIterationColor}};
  for (std::size_t cls = 0; cls < kNumClasses; ++cls) {
    legend.emplace_back("language class " + std::to_string(cls), kClassColors[cls]);
  }
  legend.emplace_back("language (unclassified)", kUnclassifiedColor);
  const double legend_x = kWidth - kLegendWidth;
  for (std::size_t i = 0; i < legend.size(); ++i) {
    const double y = kMargin + 20.0 * static_cast<double>(i);
    svg << "<rect x=\"" << fixed(legend_x, 2) << "\" y=\"" << fixed(y, 2)
        << "\" width=\"10\" height=\"10\" fill=\"" << legend[i].second << "\"/>\n";
    svg << "<text x=\"" << fixed(legend_x + 16, 2) << "\" y=\"" << fixed(y + 9, 2)
        << "\" font-size=\"11\">" << legend[i].first << "</text>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

void emit_svg_scatter(const Projection2D& projection, const std::filesystem::path& path,
                      const ClassMap* classes) {
  write_file(path, svg_scatter(projection, classes));
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
  if (!out) throw DataError("write failed for " + path.string());
}

}  // namespace langinc::report
