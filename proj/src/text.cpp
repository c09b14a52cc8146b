#include "langinc/text.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

namespace langinc::text {
namespace {

bool is_mark(UChar32 c) {
  const int8_t type = u_charType(c);
  return type == U_NON_SPACING_MARK || type == U_COMBINING_SPACING_MARK ||
         type == U_ENCLOSING_MARK;
}

void append_utf8(std::string& out, UChar32 c) {
  char buffer[U8_MAX_LENGTH];
  int32_t length = 0;
  UBool error = false;
  U8_APPEND(reinterpret_cast<uint8_t*>(buffer), length, U8_MAX_LENGTH, c, error);
  if (!error) out.append(buffer, static_cast<std::size_t>(length));
}

// Walks the text and emits maximal runs of code points accepted by
// `in_word`; marks extend a run but never start one.
template <typename Accept, typename Emit>
std::vector<std::string> runs(std::string_view utf8, Accept in_word, Emit emit) {
  std::vector<std::string> tokens;
  std::string current;
  const auto* bytes = reinterpret_cast<const uint8_t*>(utf8.data());
  const auto length = static_cast<int32_t>(utf8.size());
  int32_t offset = 0;
  while (offset < length) {
    UChar32 c = 0;
    U8_NEXT(bytes, offset, length, c);
    const bool keep = c >= 0 && (in_word(c) || (!current.empty() && is_mark(c)));
    if (keep) {
      emit(current, c);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

}  // namespace

std::vector<std::string> letter_tokens(std::string_view utf8) {
  return runs(
      utf8, [](UChar32 c) { return u_isalpha(c) != 0; },
      [](std::string& out, UChar32 c) { append_utf8(out, c); });
}

std::vector<std::string> word_tokens(std::string_view utf8) {
  return runs(
      utf8, [](UChar32 c) { return u_isalpha(c) != 0 || u_isdigit(c) != 0; },
      [](std::string& out, UChar32 c) { append_utf8(out, u_tolower(c)); });
}

std::string to_lower(std::string_view utf8) {
  std::string out;
  out.reserve(utf8.size());
  const auto* bytes = reinterpret_cast<const uint8_t*>(utf8.data());
  const auto length = static_cast<int32_t>(utf8.size());
  int32_t offset = 0;
  while (offset < length) {
    UChar32 c = 0;
    U8_NEXT(bytes, offset, length, c);
    if (c >= 0) append_utf8(out, u_tolower(c));
  }
  return out;
}

}  // namespace langinc::text
