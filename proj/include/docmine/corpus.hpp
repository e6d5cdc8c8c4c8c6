#pragma once

// Reuters-21578 SGML ingestion, the ModApte split, and the JSON-lines
// document dump used to persist an ingested collection.

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "docmine/error.hpp"

namespace docmine {

using DocId = std::uint32_t;

enum class CategoryFamily : std::uint8_t { Exchanges, Orgs, People, Places, Topics };

inline constexpr std::array<CategoryFamily, 5> kAllFamilies = {
    CategoryFamily::Exchanges, CategoryFamily::Orgs, CategoryFamily::People,
    CategoryFamily::Places, CategoryFamily::Topics};

inline constexpr std::size_t family_slot(CategoryFamily f) { return static_cast<std::size_t>(f); }

// Lowercase name, also the key used in dumps, reports and the HTTP API.
inline constexpr std::string_view family_name(CategoryFamily f) {
  constexpr std::array<std::string_view, 5> names = {"exchanges", "orgs", "people", "places",
                                                     "topics"};
  return names[family_slot(f)];
}

// SGML container tag holding the family's <D> entries.
inline constexpr std::string_view family_tag(CategoryFamily f) {
  constexpr std::array<std::string_view, 5> tags = {"EXCHANGES", "ORGS", "PEOPLE", "PLACES",
                                                    "TOPICS"};
  return tags[family_slot(f)];
}

inline std::optional<CategoryFamily> parse_family(std::string_view name) {
  for (auto f : kAllFamilies) {
    if (family_name(f) == name) return f;
  }
  return std::nullopt;
}

enum class LewisSplit : std::uint8_t { Train, Test, NotUsed };
enum class TopicsAttr : std::uint8_t { Yes, No, Bypass };

inline constexpr std::string_view to_string(LewisSplit s) {
  switch (s) {
    case LewisSplit::Train: return "TRAIN";
    case LewisSplit::Test: return "TEST";
    case LewisSplit::NotUsed: return "NOT-USED";
  }
  return "NOT-USED";
}

inline constexpr std::string_view to_string(TopicsAttr t) {
  switch (t) {
    case TopicsAttr::Yes: return "YES";
    case TopicsAttr::No: return "NO";
    case TopicsAttr::Bypass: return "BYPASS";
  }
  return "NO";
}

inline std::optional<LewisSplit> parse_lewis_split(std::string_view s) {
  if (s == "TRAIN") return LewisSplit::Train;
  if (s == "TEST") return LewisSplit::Test;
  if (s == "NOT-USED") return LewisSplit::NotUsed;
  return std::nullopt;
}

inline std::optional<TopicsAttr> parse_topics_attr(std::string_view s) {
  if (s == "YES") return TopicsAttr::Yes;
  if (s == "NO") return TopicsAttr::No;
  if (s == "BYPASS") return TopicsAttr::Bypass;
  return std::nullopt;
}

using TagSet = std::set<std::string>;

struct LabeledDocument {
  DocId new_id = 0;
  LewisSplit lewis_split = LewisSplit::NotUsed;
  TopicsAttr topics_attr = TopicsAttr::No;
  std::string title;
  std::string dateline;
  std::string body;
  std::array<TagSet, 5> labels;

  const TagSet& tags(CategoryFamily f) const { return labels[family_slot(f)]; }
  TagSet& tags(CategoryFamily f) { return labels[family_slot(f)]; }

  // Title and body joined; the text every classifier and the index see.
  std::string text() const {
    if (title.empty()) return body;
    if (body.empty()) return title;
    return title + "\n" + body;
  }

  friend bool operator==(const LabeledDocument&, const LabeledDocument&) = default;
};

inline bool family_truth(const LabeledDocument& doc, CategoryFamily family) {
  return !doc.tags(family).empty();
}

struct CorpusSplit {
  std::vector<LabeledDocument> train;
  std::vector<LabeledDocument> test;
  std::vector<LabeledDocument> unused;
};

inline CorpusSplit modapte_split(const std::vector<LabeledDocument>& docs) {
  CorpusSplit split;
  for (const auto& d : docs) {
    if (d.topics_attr == TopicsAttr::Yes && d.lewis_split == LewisSplit::Train) {
      split.train.push_back(d);
    } else if (d.topics_attr == TopicsAttr::Yes && d.lewis_split == LewisSplit::Test) {
      split.test.push_back(d);
    } else {
      split.unused.push_back(d);
    }
  }
  return split;
}

// ---------------------------------------------------------------------------
// SGML parsing

struct SgmlSource {
  std::string name;
  std::string bytes;
};

struct ParseError {
  std::string file;
  std::size_t offset = 0;
  std::string message;

  std::string describe() const {
    return file + ":" + std::to_string(offset) + ": " + message;
  }
};

struct ParseResult {
  std::vector<LabeledDocument> documents;
  std::vector<ParseError> errors;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

// Decodes the standard character entities, drops numeric control
// entities and bytes outside printable ASCII (whitespace kept).
inline std::string decode_text(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const auto c = static_cast<unsigned char>(raw[i]);
    if (c == '&') {
      const auto semi = raw.find(';', i + 1);
      if (semi != std::string_view::npos && semi - i <= 8) {
        const auto ent = raw.substr(i + 1, semi - i - 1);
        if (ent == "amp") { out += '&'; i = semi; continue; }
        if (ent == "lt") { out += '<'; i = semi; continue; }
        if (ent == "gt") { out += '>'; i = semi; continue; }
        if (ent == "quot") { out += '"'; i = semi; continue; }
        if (ent.size() >= 2 && ent[0] == '#' &&
            std::all_of(ent.begin() + 1, ent.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) {
          const int code = std::stoi(std::string(ent.substr(1)));
          if (code >= 32 && code < 127) out += static_cast<char>(code);
          i = semi;
          continue;
        }
      }
      out += '&';
      continue;
    }
    if (c >= 0x80) continue;
    if (c < 0x20 && c != '\n' && c != '\t' && c != '\r') continue;
    if (c == 0x7f) continue;
    out += static_cast<char>(c);
  }
  return out;
}

// Content between <TAG ...> and </TAG> inside `scope`, if present.
inline std::optional<std::string_view> element(std::string_view scope, std::string_view tag) {
  const std::string open = "<" + std::string(tag);
  std::size_t pos = 0;
  while ((pos = scope.find(open, pos)) != std::string_view::npos) {
    const auto after = pos + open.size();
    if (after < scope.size() && (scope[after] == '>' || scope[after] == ' ')) break;
    pos = after;
  }
  if (pos == std::string_view::npos) return std::nullopt;
  const auto gt = scope.find('>', pos);
  if (gt == std::string_view::npos) return std::nullopt;
  const std::string close = "</" + std::string(tag) + ">";
  const auto end = scope.find(close, gt + 1);
  if (end == std::string_view::npos) return scope.substr(gt + 1);
  return scope.substr(gt + 1, end - gt - 1);
}

inline std::optional<std::string> attribute(std::string_view open_tag, std::string_view name) {
  const std::string key = " " + std::string(name) + "=\"";
  const auto p = open_tag.find(key);
  if (p == std::string_view::npos) return std::nullopt;
  const auto start = p + key.size();
  const auto end = open_tag.find('"', start);
  if (end == std::string_view::npos) return std::nullopt;
  return std::string(open_tag.substr(start, end - start));
}

inline TagSet d_children(std::string_view container) {
  TagSet tags;
  std::size_t pos = 0;
  while ((pos = container.find("<D>", pos)) != std::string_view::npos) {
    const auto start = pos + 3;
    const auto end = container.find("</D>", start);
    if (end == std::string_view::npos) break;
    std::string tag = decode_text(trim(container.substr(start, end - start)));
    std::transform(tag.begin(), tag.end(), tag.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    if (!tag.empty()) tags.insert(std::move(tag));
    pos = end + 4;
  }
  return tags;
}

// `record` spans the open tag through the closing </REUTERS>.
inline LabeledDocument parse_record(std::string_view open_tag, std::string_view inner,
                                    DocId new_id) {
  LabeledDocument doc;
  doc.new_id = new_id;
  if (auto s = attribute(open_tag, "LEWISSPLIT")) {
    doc.lewis_split = parse_lewis_split(*s).value_or(LewisSplit::NotUsed);
  }
  if (auto t = attribute(open_tag, "TOPICS")) {
    doc.topics_attr = parse_topics_attr(*t).value_or(TopicsAttr::No);
  }
  for (auto f : kAllFamilies) {
    if (auto c = element(inner, family_tag(f))) doc.tags(f) = d_children(*c);
  }
  if (auto text = element(inner, "TEXT")) {
    const auto title = element(*text, "TITLE");
    const auto dateline = element(*text, "DATELINE");
    const auto body = element(*text, "BODY");
    if (title) doc.title = std::string(trim(decode_text(*title)));
    if (dateline) doc.dateline = std::string(trim(decode_text(*dateline)));
    if (body) {
      doc.body = std::string(trim(decode_text(*body)));
    } else if (!title && !dateline) {
      // TYPE="UNPROC": raw text directly under <TEXT>.
      doc.body = std::string(trim(decode_text(*text)));
    }
  }
  return doc;
}

inline void parse_source(const SgmlSource& src, ParseResult& out,
                         std::unordered_set<DocId>& seen) {
  const std::string_view bytes = src.bytes;
  constexpr std::string_view kOpen = "<REUTERS";
  constexpr std::string_view kClose = "</REUTERS>";
  std::size_t pos = bytes.find(kOpen);
  while (pos != std::string_view::npos) {
    const auto next_open = bytes.find(kOpen, pos + kOpen.size());
    const auto gt = bytes.find('>', pos);
    const auto close = bytes.find(kClose, pos);
    if (gt == std::string_view::npos || close == std::string_view::npos ||
        (next_open != std::string_view::npos && close > next_open) || gt > close) {
      out.errors.push_back({src.name, pos, "unterminated REUTERS element"});
      pos = next_open;
      continue;
    }
    const auto open_tag = bytes.substr(pos, gt - pos + 1);
    const auto inner = bytes.substr(gt + 1, close - gt - 1);
    const auto id_text = attribute(open_tag, "NEWID");
    std::optional<DocId> new_id;
    if (id_text && !id_text->empty() && id_text->size() <= 9 &&
        std::all_of(id_text->begin(), id_text->end(), [](char ch) { return ch >= '0' && ch <= '9'; })) {
      const auto v = std::stoul(*id_text);
      if (v > 0) new_id = static_cast<DocId>(v);
    }
    if (!new_id) {
      out.errors.push_back({src.name, pos, "missing or invalid NEWID attribute"});
    } else if (!seen.insert(*new_id).second) {
      out.errors.push_back({src.name, pos, "duplicate NEWID " + std::to_string(*new_id)});
    } else {
      out.documents.push_back(parse_record(open_tag, inner, *new_id));
    }
    pos = next_open;
  }
}

}  // namespace detail

// One LabeledDocument per <REUTERS> record, in file-then-record order.
// Broken records are reported in `errors` and skipped.
inline ParseResult parse_collection(const std::vector<SgmlSource>& files) {
  ParseResult result;
  std::unordered_set<DocId> seen;
  for (const auto& f : files) detail::parse_source(f, result, seen);
  return result;
}

inline std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// The reut2-NNN.sgm files of a distribution directory, in canonical order.
inline std::vector<SgmlSource> load_sgml_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw DataError("corpus directory not found: " + dir.string());
  }
  std::vector<std::filesystem::path> paths;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (entry.is_regular_file() && name.rfind("reut2-", 0) == 0 && entry.path().extension() == ".sgm") {
      paths.push_back(entry.path());
    }
  }
  std::sort(paths.begin(), paths.end());
  if (paths.empty()) throw DataError("no reut2-*.sgm files in " + dir.string());
  std::vector<SgmlSource> sources;
  sources.reserve(paths.size());
  for (const auto& p : paths) sources.push_back({p.filename().string(), read_file_bytes(p)});
  return sources;
}

// ---------------------------------------------------------------------------
// Document dump: one JSON object per line, keys in a fixed order.

inline std::string dump_record(const LabeledDocument& d) {
  nlohmann::ordered_json j;
  j["new_id"] = d.new_id;
  j["split"] = to_string(d.lewis_split);
  j["topics_attr"] = to_string(d.topics_attr);
  for (auto f : kAllFamilies) j[std::string(family_name(f))] = d.tags(f);
  j["title"] = d.title;
  j["dateline"] = d.dateline;
  j["body"] = d.body;
  return j.dump();
}

inline LabeledDocument parse_dump_record(std::string_view line) {
  const auto j = nlohmann::json::parse(line);
  LabeledDocument d;
  d.new_id = j.at("new_id").get<DocId>();
  const auto split = parse_lewis_split(j.at("split").get<std::string>());
  if (!split) throw DataError("invalid split in dump record " + std::to_string(d.new_id));
  d.lewis_split = *split;
  const auto topics = parse_topics_attr(j.at("topics_attr").get<std::string>());
  if (!topics) throw DataError("invalid topics_attr in dump record " + std::to_string(d.new_id));
  d.topics_attr = *topics;
  for (auto f : kAllFamilies) {
    for (const auto& t : j.at(std::string(family_name(f)))) d.tags(f).insert(t.get<std::string>());
  }
  d.title = j.at("title").get<std::string>();
  d.dateline = j.at("dateline").get<std::string>();
  d.body = j.at("body").get<std::string>();
  return d;
}

inline std::string write_dump(const std::vector<LabeledDocument>& docs) {
  std::string out;
  for (const auto& d : docs) {
    out += dump_record(d);
    out += '\n';
  }
  return out;
}

inline std::vector<LabeledDocument> read_dump(std::string_view text, std::string_view source = "dump") {
  std::vector<LabeledDocument> docs;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = text.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (detail::trim(line).empty()) continue;
    try {
      docs.push_back(parse_dump_record(line));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(std::string(source) + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return docs;
}

// FNV-1a 64-bit, rendered as 16 hex digits.
inline std::string checksum_hex(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace docmine
