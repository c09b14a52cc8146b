#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "langinc/analysis.hpp"
#include "langinc/metrics.hpp"
#include "langinc/taxonomy.hpp"

namespace langinc::report {

enum class Format { Csv, Json, Svg };

Format parse_format(const std::string& name);

void write_entropy(const std::vector<EntropyResult>& rows, Format format, std::ostream& out);
void write_mrr(const std::vector<MrrTable>& tables, Format format, std::ostream& out);
void write_taxonomy(const Taxonomy& taxonomy, Format format, std::ostream& out);
void write_typology(const TypologyExclusions& result, Format format, std::ostream& out);
void write_distances(const DistanceTable& table, Format format, std::ostream& out);
void write_lal_mrr(const LalMrrTable& table, Format format, std::ostream& out);
void write_regression(const RegressionEval& eval, Format format, std::ostream& out);
void write_projection_csv(const Projection2D& projection, std::ostream& out);

nlohmann::json to_json(const std::vector<EntropyResult>& rows);
nlohmann::json to_json(const std::vector<MrrTable>& tables);
nlohmann::json to_json(const DistanceTable& table);
nlohmann::json to_json(const LalMrrTable& table);
nlohmann::json to_json(const RegressionEval& eval);

/// Static scatter plot: one circle per point, colored by entity kind (and by
/// class for languages), venue labels, legend. Deterministic bytes.
std::string svg_scatter(const Projection2D& projection, const ClassMap* classes = nullptr);
void emit_svg_scatter(const Projection2D& projection, const std::filesystem::path& path,
                      const ClassMap* classes = nullptr);

/// Writes `content` to `path`; throws DataError when the file cannot be written.
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace langinc::report
