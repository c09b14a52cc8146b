#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace langinc::csv {

/// A parsed CSV file: header plus data rows, with 1-based source line numbers.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> lines;

  /// Column index by name; throws DataError naming the missing column.
  std::size_t column(std::string_view name) const;
};

/// RFC-4180-ish reader: quoted fields, doubled quotes, CRLF tolerated.
/// Blank lines are skipped. Every row must have the header's width.
Table read(const std::filesystem::path& path);
Table parse(std::string_view content, std::string_view source_name = "<memory>");

std::string escape(std::string_view field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

/// Shortest round-trippable representation, "nan"/"inf" spelled out.
std::string format_double(double value);

std::int64_t parse_int(std::string_view field, std::string_view what);

}  // namespace langinc::csv
