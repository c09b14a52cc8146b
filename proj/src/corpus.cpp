#include "langinc/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "langinc/error.hpp"
#include "langinc/text.hpp"

namespace langinc {
namespace {

using nlohmann::json;

std::string at_line(std::string_view source, std::size_t line) {
  return std::string(source) + ":" + std::to_string(line) + ": ";
}

std::string required_string(const json& object, const char* key) {
  const auto it = object.find(key);
  if (it == object.end()) throw DataError(std::string("missing key '") + key + "'");
  if (!it->is_string()) throw DataError(std::string("key '") + key + "' must be a string");
  return it->get<std::string>();
}

std::vector<std::string> string_array(const json& value, const char* key) {
  if (!value.is_array()) throw DataError(std::string("key '") + key + "' must be an array");
  std::vector<std::string> out;
  out.reserve(value.size());
  for (const auto& item : value) {
    if (!item.is_string()) {
      throw DataError(std::string("key '") + key + "' must contain only strings");
    }
    out.push_back(item.get<std::string>());
  }
  return out;
}

std::vector<std::string> dedup_preserving_order(std::vector<std::string> items) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (auto& item : items) {
    if (seen.insert(item).second) out.push_back(std::move(item));
  }
  return out;
}

PaperRecord paper_from_json(const json& object) {
  if (!object.is_object()) throw DataError("line is not a JSON object");
  PaperRecord paper;
  paper.id = required_string(object, "id");
  paper.title = required_string(object, "title");
  paper.abstract = required_string(object, "abstract");
  paper.venue = required_string(object, "venue");
  const auto year = object.find("year");
  if (year == object.end() || !year->is_number_integer()) {
    throw DataError("key 'year' must be an integer");
  }
  paper.year = year->get<int>();
  const auto authors = object.find("authors");
  if (authors == object.end()) throw DataError("missing key 'authors'");
  paper.authors = string_array(*authors, "authors");
  if (const auto body = object.find("body"); body != object.end() && !body->is_null()) {
    if (!body->is_string()) throw DataError("key 'body' must be a string");
    paper.body = body->get<std::string>();
  }
  if (const auto languages = object.find("languages"); languages != object.end()) {
    const auto ids = string_array(*languages, "languages");
    paper.languages.insert(ids.begin(), ids.end());
    paper.languages_annotated = true;
  }
  return paper;
}

json paper_to_json(const PaperRecord& paper) {
  json object;
  object["id"] = paper.id;
  object["title"] = paper.title;
  object["abstract"] = paper.abstract;
  object["year"] = paper.year;
  object["venue"] = paper.venue;
  object["authors"] = paper.authors;
  if (paper.body) object["body"] = *paper.body;
  if (paper.languages_annotated) {
    object["languages"] = std::vector<std::string>(paper.languages.begin(), paper.languages.end());
  }
  return object;
}

}  // namespace

Corpus::Corpus(std::vector<PaperRecord> papers) : papers_(std::move(papers)) {
  std::unordered_set<std::string> ids;
  for (auto& paper : papers_) {
    if (paper.id.empty()) throw DataError("paper with empty id");
    if (!ids.insert(paper.id).second) throw DataError("duplicate paper id '" + paper.id + "'");
    if (paper.year < kMinYear || paper.year > kMaxYear) {
      throw DataError("paper '" + paper.id + "' has year " + std::to_string(paper.year) +
                      " outside " + std::to_string(kMinYear) + "-" + std::to_string(kMaxYear));
    }
    paper.authors = dedup_preserving_order(std::move(paper.authors));
    venues_.insert(paper.venue);
    years_.insert(paper.year);
  }
}

// -- Gazetteer ---------------------------------------------------------------

void Gazetteer::add(const std::string& id, const std::string& canonical_name,
                    const std::vector<std::string>& aliases) {
  if (id.empty()) throw DataError("gazetteer entry with empty id");
  if (entries_.contains(id)) throw DataError("gazetteer id '" + id + "' listed twice");
  std::vector<std::string> all;
  all.push_back(canonical_name);
  all.insert(all.end(), aliases.begin(), aliases.end());
  all = dedup_preserving_order(std::move(all));
  for (const auto& alias : all) {
    if (alias.empty()) throw DataError("gazetteer id '" + id + "' has an empty alias");
    if (const auto owner = alias_owner_.find(alias); owner != alias_owner_.end()) {
      throw DataError("alias '" + alias + "' claimed by both '" + owner->second + "' and '" + id +
                      "'");
    }
  }
  for (const auto& alias : all) alias_owner_.emplace(alias, id);
  entries_.emplace(id, std::move(all));
}

std::set<std::string> Gazetteer::ids() const {
  std::set<std::string> out;
  for (const auto& [id, aliases] : entries_) out.insert(id);
  return out;
}

std::optional<std::string> Gazetteer::id_for_alias(const std::string& alias) const {
  const auto it = alias_owner_.find(alias);
  if (it == alias_owner_.end()) return std::nullopt;
  return it->second;
}

// -- Detection ---------------------------------------------------------------

FieldSelector FieldSelector::parse(std::string_view list) {
  FieldSelector fields{false, false, false};
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t end = std::min(list.find(',', start), list.size());
    const std::string_view name = list.substr(start, end - start);
    if (name == "title") {
      fields.title = true;
    } else if (name == "abstract") {
      fields.abstract = true;
    } else if (name == "body") {
      fields.body = true;
    } else {
      throw UsageError("unknown field '" + std::string(name) + "' (expected title, abstract, body)");
    }
    start = end + 1;
  }
  return fields;
}

LanguageDetector::LanguageDetector(const Gazetteer& gazetteer) {
  for (const auto& [id, aliases] : gazetteer.entries()) {
    for (const auto& alias : aliases) {
      auto tokens = text::letter_tokens(alias);
      if (tokens.empty()) continue;
      by_first_token_[tokens.front()].push_back(Pattern{std::move(tokens), id});
    }
  }
}

std::set<std::string> LanguageDetector::detect(std::string_view content) const {
  std::set<std::string> found;
  const auto tokens = text::letter_tokens(content);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto candidates = by_first_token_.find(tokens[i]);
    if (candidates == by_first_token_.end()) continue;
    for (const auto& pattern : candidates->second) {
      if (i + pattern.tokens.size() > tokens.size()) continue;
      if (std::equal(pattern.tokens.begin(), pattern.tokens.end(), tokens.begin() + i)) {
        found.insert(pattern.id);
      }
    }
  }
  return found;
}

std::set<std::string> LanguageDetector::detect(const PaperRecord& paper,
                                               FieldSelector fields) const {
  // Fields are scanned separately so an alias never spans two fields.
  std::set<std::string> found;
  auto scan = [&](std::string_view content) {
    auto hits = detect(content);
    found.insert(hits.begin(), hits.end());
  };
  if (fields.title) scan(paper.title);
  if (fields.abstract) scan(paper.abstract);
  if (fields.body && paper.body) scan(*paper.body);
  return found;
}

std::set<std::string> detect_languages(const PaperRecord& paper, const Gazetteer& gazetteer,
                                       FieldSelector fields) {
  return LanguageDetector(gazetteer).detect(paper, fields);
}

Corpus annotate(const Corpus& corpus, const Gazetteer& gazetteer, FieldSelector fields) {
  const LanguageDetector detector(gazetteer);
  std::vector<PaperRecord> papers = corpus.papers();
  for (auto& paper : papers) {
    if (paper.languages_annotated) continue;
    paper.languages = detector.detect(paper, fields);
    paper.languages_annotated = true;
  }
  return Corpus(std::move(papers));
}

// -- I/O ---------------------------------------------------------------------

Corpus parse_corpus(std::istream& in, std::string_view source_name) {
  std::vector<PaperRecord> papers;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    PaperRecord paper;
    try {
      paper = paper_from_json(json::parse(line));
    } catch (const json::exception& e) {
      throw DataError(at_line(source_name, line_number) + "malformed JSON: " + e.what());
    } catch (const DataError& e) {
      throw DataError(at_line(source_name, line_number) + e.what());
    }
    if (paper.id.empty()) throw DataError(at_line(source_name, line_number) + "empty paper id");
    if (!ids.insert(paper.id).second) {
      throw DataError(at_line(source_name, line_number) + "duplicate paper id '" + paper.id + "'");
    }
    if (paper.year < kMinYear || paper.year > kMaxYear) {
      throw DataError(at_line(source_name, line_number) + "year " + std::to_string(paper.year) +
                      " out of range");
    }
    papers.push_back(std::move(paper));
  }
  return Corpus(std::move(papers));
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus " + path.string());
  return parse_corpus(in, path.string());
}

Gazetteer parse_gazetteer(std::istream& in, std::string_view source_name) {
  Gazetteer gazetteer;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> columns;
    std::size_t start = 0;
    while (true) {
      const std::size_t tab = line.find('\t', start);
      columns.push_back(line.substr(start, tab == std::string::npos ? tab : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (columns.size() < 2 || columns.size() > 3) {
      throw DataError(at_line(source_name, line_number) +
                      "expected canonical_id<TAB>canonical_name<TAB>aliases");
    }
    std::vector<std::string> aliases;
    if (columns.size() == 3 && !columns[2].empty()) {
      std::size_t from = 0;
      while (true) {
        const std::size_t bar = columns[2].find('|', from);
        aliases.push_back(columns[2].substr(from, bar == std::string::npos ? bar : bar - from));
        if (bar == std::string::npos) break;
        from = bar + 1;
      }
    }
    try {
      gazetteer.add(columns[0], columns[1], aliases);
    } catch (const DataError& e) {
      throw DataError(at_line(source_name, line_number) + e.what());
    }
  }
  return gazetteer;
}

Gazetteer load_gazetteer(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open gazetteer " + path.string());
  return parse_gazetteer(in, path.string());
}

void write_corpus(const Corpus& corpus, std::ostream& out) {
  for (const auto& paper : corpus.papers()) out << paper_to_json(paper).dump() << '\n';
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write_corpus(corpus, out);
  if (!out) throw DataError("write failed for " + path.string());
}

void write_gazetteer(const Gazetteer& gazetteer, std::ostream& out) {
  out << "# canonical_id\tcanonical_name\taliases\n";
  for (const auto& [id, aliases] : gazetteer.entries()) {
    out << id << '\t' << aliases.front() << '\t';
    for (std::size_t i = 1; i < aliases.size(); ++i) {
      if (i > 1) out << '|';
      out << aliases[i];
    }
    out << '\n';
  }
}

}  // namespace langinc
