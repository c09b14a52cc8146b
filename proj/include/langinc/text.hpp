#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace langinc::text {

/// Splits UTF-8 text into maximal runs of Unicode letters, keeping the
/// original casing. Everything else (digits, punctuation, hyphens,
/// whitespace) is a boundary. Combining marks stay attached to the
/// preceding letter run. Invalid UTF-8 bytes act as boundaries.
std::vector<std::string> letter_tokens(std::string_view utf8);

/// Lowercased maximal runs of Unicode letters and digits.
std::vector<std::string> word_tokens(std::string_view utf8);

/// Simple per-code-point lowercase mapping.
std::string to_lower(std::string_view utf8);

}  // namespace langinc::text
