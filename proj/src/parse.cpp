// Copyright 2026 The sdekit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sdekit/parse.hpp"

#include <array>
#include <unordered_set>

#include "grammar.hpp"
#include "json.hpp"
#include "sdekit/errors.hpp"
#include "text_util.hpp"

namespace sde {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr std::array<std::string_view, kRepairKindCount> kRepairNames = {
    "WhitespaceNormalize",  "PunctuationVariant",   "CaseFold",
    "LabelSynonym",         "AspectAlias",          "JsonQuoteRepair",
    "TrailingTextStripped", "DuplicateAspectFirstWins", "MissingAspectDefaulted",
};

constexpr std::string_view kTableVersion = "1";

struct LabelSynonym {
  std::string_view term;
  SentimentLabel label;
};

// Compared case-insensitively against the whole value.
constexpr LabelSynonym kLabelSynonyms[] = {
    {"pos", SentimentLabel::Positive},
    {"positive sentiment", SentimentLabel::Positive},
    {"good", SentimentLabel::Positive},
    {"favorable", SentimentLabel::Positive},
    {"favourable", SentimentLabel::Positive},
    {"\xE6\xAD\xA3\xE9\x9D\xA2", SentimentLabel::Positive},  // zheng mian
    {"\xE7\xA7\xAF\xE6\x9E\x81", SentimentLabel::Positive},  // ji ji
    {"\xE6\xAD\xA3\xE5\x90\x91", SentimentLabel::Positive},  // zheng xiang
    {"neu", SentimentLabel::Neutral},
    {"neutral sentiment", SentimentLabel::Neutral},
    {"\xE4\xB8\xAD\xE6\x80\xA7", SentimentLabel::Neutral},  // zhong xing
    {"\xE4\xB8\xAD\xE7\xAB\x8B", SentimentLabel::Neutral},  // zhong li
    {"neg", SentimentLabel::Negative},
    {"negative sentiment", SentimentLabel::Negative},
    {"bad", SentimentLabel::Negative},
    {"unfavorable", SentimentLabel::Negative},
    {"unfavourable", SentimentLabel::Negative},
    {"\xE8\xB4\x9F\xE9\x9D\xA2", SentimentLabel::Negative},  // fu mian
    {"\xE6\xB6\x88\xE6\x9E\x81", SentimentLabel::Negative},  // xiao ji
    {"\xE8\xB4\x9F\xE5\x90\x91", SentimentLabel::Negative},  // fu xiang
    {"unmentioned", SentimentLabel::Unmentioned},
    {"not mentioned", SentimentLabel::Unmentioned},
    {"not_mentioned", SentimentLabel::Unmentioned},
    {"no mention", SentimentLabel::Unmentioned},
    {"none", SentimentLabel::Unmentioned},
    {"n/a", SentimentLabel::Unmentioned},
    {"na", SentimentLabel::Unmentioned},
    {"null", SentimentLabel::Unmentioned},
    {"nil", SentimentLabel::Unmentioned},
    {"not applicable", SentimentLabel::Unmentioned},
    {"[]", SentimentLabel::Unmentioned},
    {"\xE6\x9C\xAA\xE6\x8F\x90\xE5\x8F\x8A", SentimentLabel::Unmentioned},  // wei ti ji
};

// Span-task values meaning "no mentions".
constexpr std::string_view kEmptySynonyms[] = {
    "none", "n/a", "na", "null", "nil", "not mentioned", "no mention", "unmentioned",
};

struct AspectAlias {
  std::string_view alias;  // normalized spelling
  std::string_view aspect;
};

// Applied only when the target is in the schema; first hit wins.
constexpr AspectAlias kAspectAliases[] = {
    {"drink", "beverage"},          {"drinks", "beverage"},
    {"beverages", "beverage"},      {"cost", "price"},
    {"prices", "price"},            {"pricing", "price"},
    {"value_for_money", "price"},   {"cleanliness", "hygiene"},
    {"sanitation", "hygiene"},      {"hygienic", "hygiene"},
    {"staff", "staff_attitude"},    {"service", "staff_attitude"},
    {"service_attitude", "staff_attitude"}, {"attitude", "staff_attitude"},
    {"parking", "parking_convenience"},     {"traffic", "traffic_convenience"},
    {"transportation", "traffic_convenience"}, {"location", "traffic_convenience"},
    {"queue", "queuing"},           {"queueing", "queuing"},
    {"waiting", "queuing"},         {"wait", "queuing"},
    {"service", "serving_speed"},   {"service_speed", "serving_speed"},
    {"speed", "serving_speed"},     {"decor", "decoration"},
    {"decorations", "decoration"},  {"ambience", "decoration"},
    {"ambiance", "decoration"},     {"environment", "decoration"},
    {"noise_level", "noise"},       {"noisiness", "noise"},
    {"dish", "food"},               {"dishes", "food"},
    {"taste", "food"},              {"proteins", "protein"},
    {"cell_lines", "cell_line"},    {"cell_types", "cell_type"},
};

class RepairSet {
 public:
  void add(RepairKind k) { bits_ |= bit(k); }
  void merge(const RepairSet& o) { bits_ |= o.bits_; }
  bool has(RepairKind k) const { return (bits_ & bit(k)) != 0; }
  bool empty() const { return bits_ == 0; }
  bool at_most_case() const { return (bits_ & ~bit(RepairKind::CaseFold)) == 0; }

  std::vector<RepairKind> list() const {
    std::vector<RepairKind> out;
    for (int i = 0; i < kRepairKindCount; ++i) {
      if (bits_ & (1u << i)) out.push_back(static_cast<RepairKind>(i));
    }
    return out;
  }

 private:
  static unsigned bit(RepairKind k) { return 1u << static_cast<int>(k); }
  unsigned bits_ = 0;
};

// ---------------------------------------------------------------------------
// Resolution of aspect and value tokens.

std::string normalize_name(std::string_view s) {
  std::string out;
  for (char c : text::trim(s)) {
    char d = text::to_lower(c);
    if (d == ' ' || d == '-') d = '_';
    if (d == '_' && !out.empty() && out.back() == '_') continue;
    out += d;
  }
  return out;
}

struct AspectMatch {
  std::size_t index;
  RepairSet repairs;
};

std::optional<AspectMatch> resolve_aspect(std::string_view raw,
                                          const AspectSchema& schema) {
  const auto& aspects = schema.aspects;
  for (std::size_t i = 0; i < aspects.size(); ++i) {
    if (aspects[i] == raw) return AspectMatch{i, {}};
  }
  RepairSet r;
  for (std::size_t i = 0; i < aspects.size(); ++i) {
    if (text::iequals(aspects[i], raw)) {
      r.add(RepairKind::CaseFold);
      return AspectMatch{i, r};
    }
  }
  const std::string norm = normalize_name(raw);
  if (norm.empty()) return std::nullopt;
  r.add(RepairKind::AspectAlias);
  for (std::size_t i = 0; i < aspects.size(); ++i) {
    if (normalize_name(aspects[i]) == norm) return AspectMatch{i, r};
  }
  for (const AspectAlias& a : kAspectAliases) {
    if (a.alias != norm) continue;
    if (auto idx = schema.index_of(a.aspect)) return AspectMatch{*idx, r};
  }
  return std::nullopt;
}

// Spellings an aspect may take in running text, longest-match candidates.
std::vector<std::pair<std::string, std::size_t>> aspect_spellings(
    const AspectSchema& schema) {
  std::vector<std::pair<std::string, std::size_t>> out;
  auto add_forms = [&out](std::string_view name, std::size_t idx) {
    std::string form(name);
    out.emplace_back(form, idx);
    std::string spaced = form;
    for (char& c : spaced) {
      if (c == '_') c = ' ';
    }
    if (spaced != form) out.emplace_back(spaced, idx);
    std::string dashed = form;
    for (char& c : dashed) {
      if (c == '_') c = '-';
    }
    if (dashed != form) out.emplace_back(dashed, idx);
  };
  for (std::size_t i = 0; i < schema.aspects.size(); ++i) add_forms(schema.aspects[i], i);
  for (const AspectAlias& a : kAspectAliases) {
    if (auto idx = schema.index_of(a.aspect)) add_forms(a.alias, *idx);
  }
  return out;
}

struct Hit {
  std::size_t index;
  std::size_t length;
  RepairSet repairs;
};

// Longest aspect spelling at text[pos] that is followed by `follow`.
std::optional<Hit> match_aspect_at(
    std::string_view text, std::size_t pos, std::string_view follow,
    const std::vector<std::pair<std::string, std::size_t>>& spellings,
    const AspectSchema& schema) {
  std::optional<std::size_t> best;
  for (const auto& [form, idx] : spellings) {
    if (best && form.size() <= *best) continue;
    if (!text::istarts_with(text.substr(pos), form)) continue;
    if (!text::istarts_with(text.substr(pos + form.size()), follow)) continue;
    best = form.size();
  }
  if (!best) return std::nullopt;
  auto m = resolve_aspect(text.substr(pos, *best), schema);
  if (!m) return std::nullopt;
  return Hit{m->index, *best, m->repairs};
}

struct LabelMatch {
  SentimentLabel label;
  RepairSet repairs;
};

struct Term {
  std::string text;
  SentimentLabel label;
  bool canonical;
};

std::vector<Term> value_terms(const DesignStrategy& s, const AspectSchema& schema) {
  std::vector<Term> out;
  for (SentimentLabel l : kAllLabels) {
    std::string txt = l == SentimentLabel::Unmentioned ? schema.placeholder_token
                                                       : std::string(label_name(l));
    const std::string& num = schema.numeric_label(l);
    out.push_back({s.label_style == LabelStyle::Num ? num : txt, l, true});
    out.push_back({s.label_style == LabelStyle::Num ? txt : num, l, false});
  }
  for (const LabelSynonym& syn : kLabelSynonyms) {
    out.push_back({std::string(syn.term), syn.label, false});
  }
  return out;
}

bool wrapped(std::string_view v, std::string_view open, std::string_view close) {
  return v.size() >= open.size() + close.size() && v.substr(0, open.size()) == open &&
         v.substr(v.size() - close.size()) == close;
}

std::optional<std::string_view> unwrap(std::string_view v) {
  static constexpr std::pair<std::string_view, std::string_view> kPairs[] = {
      {"\"", "\""}, {"'", "'"}, {"`", "`"}, {"(", ")"}, {"[", "]"}, {"<", ">"},
      {"\xE2\x80\x9C", "\xE2\x80\x9D"}, {"\xE2\x80\x98", "\xE2\x80\x99"},
      {"\xE3\x80\x8C", "\xE3\x80\x8D"},
  };
  for (const auto& [o, c] : kPairs) {
    if (wrapped(v, o, c)) return text::trim(v.substr(o.size(), v.size() - o.size() - c.size()));
  }
  return std::nullopt;
}

std::optional<LabelMatch> resolve_bare(std::string_view v, const DesignStrategy& s,
                                       const AspectSchema& schema, RepairSet r) {
  const std::vector<Term> terms = value_terms(s, schema);
  if (s.label_style == LabelStyle::Num) {
    std::string_view t = v;
    if (t.size() >= 2 && (wrapped(t, "\"", "\"") || wrapped(t, "'", "'"))) {
      t = text::trim(t.substr(1, t.size() - 2));
    }
    for (const Term& term : terms) {
      if (term.canonical && term.text == t) return LabelMatch{term.label, r};
    }
  }
  for (int round = 0; round < 3; ++round) {
    for (const Term& term : terms) {
      if (term.canonical && term.text == v) return LabelMatch{term.label, r};
    }
    for (const Term& term : terms) {
      if (term.canonical && text::iequals(term.text, v)) {
        r.add(RepairKind::CaseFold);
        return LabelMatch{term.label, r};
      }
    }
    for (const Term& term : terms) {
      if (!term.canonical && text::iequals(term.text, v)) {
        r.add(RepairKind::LabelSynonym);
        return LabelMatch{term.label, r};
      }
    }
    auto inner = unwrap(v);
    if (!inner) break;
    r.add(RepairKind::PunctuationVariant);
    v = *inner;
  }
  // Label followed by prose on the same line.
  const Term* best = nullptr;
  for (const Term& term : terms) {
    if (term.text.empty() || term.text.size() >= v.size()) continue;
    if (!text::istarts_with(v, term.text)) continue;
    if (text::is_alnum(v[term.text.size()]) && text::is_alnum(term.text.back())) continue;
    if (!best || term.text.size() > best->text.size()) best = &term;
  }
  if (!best) return std::nullopt;
  r.add(RepairKind::TrailingTextStripped);
  if (!best->canonical) {
    r.add(RepairKind::LabelSynonym);
  } else if (v.substr(0, best->text.size()) != best->text) {
    r.add(RepairKind::CaseFold);
  }
  return LabelMatch{best->label, r};
}

std::optional<LabelMatch> resolve_label(std::string_view raw, const DesignStrategy& s,
                                        const AspectSchema& schema) {
  std::string_view v = text::trim(raw);
  RepairSet r;
  if (v.empty()) return std::nullopt;
  if (grammar::uses_list(s)) {
    if (wrapped(v, "[", "]")) {
      v = text::trim(v.substr(1, v.size() - 2));
      if (v.empty()) return LabelMatch{SentimentLabel::Unmentioned, r};
    } else {
      r.add(RepairKind::PunctuationVariant);
    }
  }
  return resolve_bare(v, s, schema, r);
}

// ---------------------------------------------------------------------------
// Whole-text passes.

std::string normalize_plain(std::string_view text, bool join_lines) {
  std::string spaced = grammar::plain_spaces(text);
  std::vector<std::string> kept;
  for (std::string_view line : text::split_lines(spaced)) {
    std::string c = text::collapse_whitespace(line);
    if (!c.empty()) kept.push_back(std::move(c));
  }
  return text::join(kept, join_lines ? " " : "\n");
}

// A run of JSON-ish text: either a quoted string (delimiters included) or
// the stretch between strings.
struct Chunk {
  bool quoted;
  std::string text;
};

constexpr std::string_view kLeftDq = "\xE2\x80\x9C";
constexpr std::string_view kRightDq = "\xE2\x80\x9D";
constexpr std::string_view kLeftSq = "\xE2\x80\x98";
constexpr std::string_view kRightSq = "\xE2\x80\x99";

std::vector<Chunk> chunk_json(std::string_view s) {
  std::vector<Chunk> out;
  std::string plain;
  std::size_t i = 0;
  auto flush = [&] {
    if (!plain.empty()) out.push_back({false, std::move(plain)});
    plain.clear();
  };
  while (i < s.size()) {
    std::string_view close;
    std::size_t open_len = 1;
    if (s[i] == '"') {
      close = "\"";
    } else if (s[i] == '\'') {
      close = "'";
    } else if (s.substr(i, kLeftDq.size()) == kLeftDq) {
      close = kRightDq;
      open_len = kLeftDq.size();
    } else if (s.substr(i, kLeftSq.size()) == kLeftSq) {
      close = kRightSq;
      open_len = kLeftSq.size();
    } else {
      plain += s[i++];
      continue;
    }
    // An apostrophe inside a word is text, not a delimiter.
    if (close == "'" && i > 0 && text::is_alnum(s[i - 1])) {
      plain += s[i++];
      continue;
    }
    std::size_t j = i + open_len;
    bool closed = false;
    while (j < s.size()) {
      if (s[j] == '\\' && close.size() == 1) {
        j += 2;
        continue;
      }
      if (s.substr(j, close.size()) == close) {
        j += close.size();
        closed = true;
        break;
      }
      if (s[j] == '\n') break;
      ++j;
    }
    if (!closed) {
      plain += s.substr(i, j - i);
      i = j;
      continue;
    }
    flush();
    out.push_back({true, std::string(s.substr(i, j - i))});
    i = j;
  }
  flush();
  return out;
}

bool is_json_space(std::string_view s, std::size_t i, std::size_t* len) {
  if (text::is_space(s[i])) {
    *len = 1;
    return true;
  }
  if (s.substr(i, 2) == "\xC2\xA0") {
    *len = 2;
    return true;
  }
  if (s.substr(i, 3) == "\xE3\x80\x80") {
    *len = 3;
    return true;
  }
  return false;
}

// R1 for JSON: no whitespace inside objects outside strings, one object per
// line.
std::string normalize_json_space(std::string_view text) {
  std::string out;
  int depth = 0;
  for (const Chunk& c : chunk_json(text)) {
    if (c.quoted) {
      out += c.text;
      continue;
    }
    const std::string& s = c.text;
    std::size_t i = 0;
    while (i < s.size()) {
      std::size_t len = 0;
      if (!is_json_space(s, i, &len)) {
        const char ch = s[i];
        if (ch == '{' || ch == '[') ++depth;
        if ((ch == '}' || ch == ']') && depth > 0) --depth;
        out += ch;
        ++i;
        continue;
      }
      bool newline = false;
      while (i < s.size() && is_json_space(s, i, &len)) {
        newline = newline || s[i] == '\n' || s[i] == '\r';
        i += len;
      }
      if (depth > 0) continue;
      const bool between_objects = !out.empty() && out.back() == '}' && i < s.size() && s[i] == '{';
      out += (newline || between_objects) ? '\n' : ' ';
    }
  }
  return normalize_plain(out, false);
}

std::string ascii_outside_strings(std::string_view text) {
  std::string out;
  for (const Chunk& c : chunk_json(text)) {
    out += c.quoted ? c.text : grammar::ascii_punctuation(c.text, false);
  }
  return out;
}

bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}

bool is_ident(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

std::string requote(const std::string& quoted) {
  std::string_view body;
  if (quoted.front() == '"') return quoted;
  if (quoted.front() == '\'') {
    body = std::string_view(quoted).substr(1, quoted.size() - 2);
  } else {
    // smart quotes, three bytes each
    body = std::string_view(quoted).substr(3, quoted.size() - 6);
  }
  std::string out = "\"";
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i] == '\\' && i + 1 < body.size() && body[i + 1] == '\'') {
      out += '\'';
      ++i;
    } else if (body[i] == '"') {
      out += "\\\"";
    } else {
      out += body[i];
    }
  }
  out += '"';
  return out;
}

// R6: code fences, smart/single quotes, bare keys, trailing commas, a
// top-level array or commas between top-level objects.
std::string repair_json(std::string_view text) {
  std::vector<std::string> lines;
  for (std::string_view line : text::split_lines(text)) {
    if (text::trim(line).substr(0, 3) == "```") continue;
    lines.emplace_back(line);
  }
  const std::string unfenced = text::join(lines, "\n");

  std::string out;
  char last_sig = '\0';
  for (const Chunk& c : chunk_json(unfenced)) {
    if (c.quoted) {
      out += requote(c.text);
      last_sig = '"';
      continue;
    }
    const std::string& s = c.text;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const char ch = s[i];
      if (is_ident_start(ch) && (last_sig == '{' || last_sig == ',')) {
        std::size_t j = i;
        while (j < s.size() && is_ident(s[j])) ++j;
        std::size_t k = j;
        while (k < s.size() && text::is_space(s[k])) ++k;
        if (k < s.size() && s[k] == ':') {
          out += '"';
          out.append(s, i, j - i);
          out += '"';
          i = j - 1;
          last_sig = '"';
          continue;
        }
      }
      if (ch == ',') {
        std::size_t k = i + 1;
        while (k < s.size() && text::is_space(s[k])) ++k;
        if (k < s.size() && (s[k] == '}' || s[k] == ']')) continue;
      }
      out += ch;
      if (!text::is_space(ch)) last_sig = ch;
    }
  }

  // Unwrap a top-level array of objects and split objects onto lines.
  std::string_view t = text::trim(out);
  std::string body(t);
  if (t.size() >= 2 && t.front() == '[' && t.back() == ']') {
    std::string_view inner = text::trim(t.substr(1, t.size() - 2));
    if (!inner.empty() && inner.front() == '{') body = std::string(inner);
  }
  std::string result;
  int depth = 0;
  for (const Chunk& c : chunk_json(body)) {
    if (c.quoted) {
      result += c.text;
      continue;
    }
    const std::string& s = c.text;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const char ch = s[i];
      if (ch == '{' || ch == '[') ++depth;
      if ((ch == '}' || ch == ']') && depth > 0) --depth;
      if (ch == ',' && depth == 0 && !result.empty() && text::trim(result).back() == '}') {
        while (!result.empty() && text::is_space(result.back())) result.pop_back();
        result += '\n';
        while (i + 1 < s.size() && text::is_space(s[i + 1])) ++i;
        continue;
      }
      result += ch;
    }
  }
  return result;
}

// Top-level {...} objects with everything between them.
struct JsonPiece {
  bool object;
  std::string text;
};

std::vector<JsonPiece> split_objects(std::string_view text) {
  std::vector<JsonPiece> out;
  std::string current;
  int depth = 0;
  auto flush_junk = [&] {
    for (std::string_view line : text::split_lines(current)) {
      std::string_view t = text::trim(line);
      if (!t.empty()) out.push_back({false, std::string(t)});
    }
    current.clear();
  };
  for (const Chunk& c : chunk_json(text)) {
    if (c.quoted) {
      current += c.text;
      continue;
    }
    for (char ch : c.text) {
      if (ch == '{') {
        if (depth == 0) flush_junk();
        ++depth;
        current += ch;
      } else if (ch == '}' && depth > 0) {
        current += ch;
        if (--depth == 0) {
          out.push_back({true, current});
          current.clear();
        }
      } else {
        current += ch;
      }
    }
  }
  if (depth > 0) {
    out.push_back({false, std::string(text::trim(current))});
  } else {
    flush_junk();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scanning into items.

struct Scan {
  // In text order; item >= 0 indexes the item list, -1 marks junk.
  struct Token {
    int item;
    std::string junk;
  };
  std::vector<Token> tokens;
  RepairSet repairs;
  bool structure_ok = true;

  void add_junk(std::string_view s) {
    if (!text::trim(s).empty()) tokens.push_back({-1, std::string(text::trim(s))});
  }
};

struct MasaItem {
  std::size_t aspect;
  RepairSet repairs;
  std::optional<SentimentLabel> label;
  grammar::MasaEntry surface;
  std::string raw;
};

struct SpanItem {
  std::size_t type;
  RepairSet repairs;
  std::optional<std::vector<std::string>> mentions;
  grammar::SpanEntry surface;
  std::string raw;
};

// "key: rest" with canonical spacing checked. Returns false when the line has
// no colon.
bool split_key(std::string_view line, std::string_view* key, std::string_view* rest,
               bool* spacing_ok) {
  const std::size_t colon = line.find(':');
  if (colon == std::string_view::npos) return false;
  std::string_view key_raw = line.substr(0, colon);
  std::string_view rest_raw = line.substr(colon + 1);
  *key = text::trim(key_raw);
  *rest = text::trim(rest_raw);
  *spacing_ok = key_raw.size() == key->size() &&
                (rest->empty() || (rest_raw.size() == rest->size() + 1 && rest_raw[0] == ' '));
  return true;
}

void scan_masa_lines(std::string_view text, const DesignStrategy& s,
                     const AspectSchema& schema, Scan& scan,
                     std::vector<MasaItem>& items) {
  for (std::string_view line : text::split_lines(text)) {
    std::string_view key, rest;
    bool spacing_ok = true;
    if (!split_key(line, &key, &rest, &spacing_ok)) {
      scan.add_junk(line);
      continue;
    }
    auto aspect = resolve_aspect(key, schema);
    if (!aspect) {
      scan.add_junk(line);
      continue;
    }
    MasaItem item;
    item.aspect = aspect->index;
    item.repairs = aspect->repairs;
    item.raw = std::string(line);
    if (!spacing_ok) item.repairs.add(RepairKind::WhitespaceNormalize);
    item.surface.aspect = std::string(key);

    std::string_view value = rest;
    if (s.reasoning != Reasoning::NoCoT) {
      const std::size_t bar =
          s.reasoning == Reasoning::CoT ? rest.rfind('|') : rest.find('|');
      if (bar == std::string_view::npos) {
        scan.structure_ok = false;
      } else {
        std::string_view left_raw = rest.substr(0, bar);
        std::string_view right_raw = rest.substr(bar + 1);
        std::string_view left = text::trim(left_raw);
        std::string_view right = text::trim(right_raw);
        const bool bar_spacing = left_raw.size() == left.size() + 1 &&
                                 right_raw.size() == right.size() + 1;
        if (!bar_spacing && !left.empty() && !right.empty()) {
          item.repairs.add(RepairKind::WhitespaceNormalize);
        }
        std::string_view desc = s.reasoning == Reasoning::CoT ? left : right;
        value = s.reasoning == Reasoning::CoT ? right : left;
        if (desc.empty()) scan.structure_ok = false;
        item.surface.description = std::string(desc);
      }
    }
    item.surface.value = std::string(value);
    if (auto m = resolve_label(value, s, schema)) {
      item.label = m->label;
      item.repairs.merge(m->repairs);
    }
    scan.tokens.push_back({static_cast<int>(items.size()), {}});
    items.push_back(std::move(item));
  }
}

std::size_t sentence_end(std::string_view text, std::size_t from) {
  for (std::size_t i = from; i < text.size(); ++i) {
    if (text[i] == '.' && (i + 1 == text.size() || text[i + 1] == ' ')) return i;
  }
  return text.size();
}

class NaturalScanner {
 public:
  NaturalScanner(std::string_view text, const DesignStrategy& s,
                 const AspectSchema& schema, Scan& scan, std::vector<MasaItem>& items)
      : text_(text), s_(s), schema_(schema), scan_(scan), items_(items),
        spellings_(aspect_spellings(schema)) {}

  void run() {
    std::size_t p = 0;
    while (p < text_.size()) {
      while (p < text_.size() && text_[p] == ' ') ++p;
      if (p >= text_.size()) break;
      p = sentence(p);
    }
  }

 private:
  // Parses one sentence at p; returns the position after it.
  std::size_t sentence(std::size_t p) {
    std::string_view rest = text_.substr(p);
    if (auto hit = match_aspect_at(text_, p, grammar::kNaturalNotMentioned.substr(0, 17),
                                   spellings_, schema_)) {
      MasaItem item;
      item.aspect = hit->index;
      item.repairs = hit->repairs;
      item.label = SentimentLabel::Unmentioned;
      item.surface.aspect = std::string(text_.substr(p, hit->length));
      item.surface.not_mentioned_sentence = true;
      std::size_t end = p + hit->length + 17;
      if (end < text_.size() && text_[end] == '.') {
        ++end;
      } else {
        scan_.structure_ok = false;
      }
      phrase_case(p + hit->length, " is not mentioned", item.repairs);
      item.raw = std::string(text_.substr(p, end - p));
      push(std::move(item));
      return end;
    }
    if (text::istarts_with(rest, grammar::kNaturalLead)) {
      RepairSet r;
      phrase_case(p, grammar::kNaturalLead, r);
      return body(p, p + grammar::kNaturalLead.size(), std::nullopt, r);
    }
    if (text::istarts_with(rest, grammar::kNaturalCotLead)) {
      const std::size_t desc_from = p + grammar::kNaturalCotLead.size();
      const std::size_t join = text::ifind(text_, grammar::kNaturalCotJoin, desc_from);
      if (join != std::string_view::npos) {
        RepairSet r;
        phrase_case(p, grammar::kNaturalCotLead, r);
        phrase_case(join, grammar::kNaturalCotJoin, r);
        std::string desc(text::trim(text_.substr(desc_from, join - desc_from)));
        if (s_.reasoning != Reasoning::CoT) scan_.structure_ok = false;
        return body(p, join + grammar::kNaturalCotJoin.size(), desc, r);
      }
    }
    return junk(p);
  }

  std::size_t body(std::size_t start, std::size_t q, std::optional<std::string> cot_desc,
                   RepairSet r) {
    auto hit = match_aspect_at(text_, q, grammar::kNaturalIs, spellings_, schema_);
    if (!hit) return junk(start);
    MasaItem item;
    item.aspect = hit->index;
    item.repairs = r;
    item.repairs.merge(hit->repairs);
    item.surface.aspect = std::string(text_.substr(q, hit->length));
    phrase_case(q + hit->length, grammar::kNaturalIs, item.repairs);
    const std::size_t value_from = q + hit->length + grammar::kNaturalIs.size();
    std::size_t end = sentence_end(text_, value_from);
    std::size_t value_to = end;
    std::size_t next = end + 1;
    if (s_.reasoning == Reasoning::RCoT) {
      const std::size_t because = text::ifind(text_, grammar::kNaturalBecause, value_from);
      if (because != std::string_view::npos && because < end) {
        value_to = because;
        phrase_case(because, grammar::kNaturalBecause, item.repairs);
        const std::size_t desc_from = because + grammar::kNaturalBecause.size();
        const std::size_t desc_to = rcot_description_end(desc_from);
        item.surface.description =
            std::string(text::trim(text_.substr(desc_from, desc_to - desc_from)));
        end = desc_to;
        next = desc_to + 1;
      } else {
        scan_.structure_ok = false;
      }
    } else if (cot_desc) {
      item.surface.description = std::move(cot_desc);
    } else if (s_.reasoning == Reasoning::CoT) {
      scan_.structure_ok = false;
    }
    if (end >= text_.size()) scan_.structure_ok = false;
    std::string_view value = text_.substr(value_from, value_to - value_from);
    item.surface.value = std::string(text::trim(value));
    if (auto m = resolve_label(value, s_, schema_)) {
      item.label = m->label;
      item.repairs.merge(m->repairs);
    }
    item.raw = std::string(text_.substr(start, std::min(end + 1, text_.size()) - start));
    push(std::move(item));
    return next;
  }

  std::size_t rcot_description_end(std::size_t from) const {
    for (std::size_t i = from; i < text_.size(); ++i) {
      if (text_[i] != '.') continue;
      if (i + 1 == text_.size()) return i;
      if (text_[i + 1] == ' ' && starts_sentence(i + 2)) return i;
    }
    return text_.size();
  }

  bool starts_sentence(std::size_t pos) const {
    std::string_view rest = text_.substr(pos);
    return text::istarts_with(rest, grammar::kNaturalLead) ||
           text::istarts_with(rest, grammar::kNaturalCotLead) ||
           match_aspect_at(text_, pos, " is not mentioned", spellings_, schema_).has_value();
  }

  std::size_t junk(std::size_t p) {
    const std::size_t end = sentence_end(text_, p);
    scan_.add_junk(text_.substr(p, std::min(end + 1, text_.size()) - p));
    return end + 1;
  }

  void phrase_case(std::size_t at, std::string_view phrase, RepairSet& r) {
    if (text_.substr(at, phrase.size()) != phrase) {
      r.add(RepairKind::CaseFold);
      scan_.structure_ok = false;
    }
  }

  void push(MasaItem item) {
    scan_.tokens.push_back({static_cast<int>(items_.size()), {}});
    items_.push_back(std::move(item));
  }

  std::string_view text_;
  const DesignStrategy& s_;
  const AspectSchema& schema_;
  Scan& scan_;
  std::vector<MasaItem>& items_;
  std::vector<std::pair<std::string, std::size_t>> spellings_;
};

// Finds `key` in a JSON object, exact first, then case-insensitively.
const ordered_json* find_key(const ordered_json& obj, std::string_view key,
                             RepairSet& r) {
  if (auto it = obj.find(std::string(key)); it != obj.end()) return &*it;
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (text::iequals(it.key(), key)) {
      r.add(RepairKind::CaseFold);
      return &it.value();
    }
  }
  return nullptr;
}

bool canonical_object(const ordered_json& obj, std::string_view text,
                      const std::vector<std::string_view>& keys) {
  if (obj.size() != keys.size()) return false;
  std::size_t i = 0;
  for (auto it = obj.begin(); it != obj.end(); ++it, ++i) {
    if (it.key() != keys[i]) return false;
  }
  return obj.dump() == text;
}

void scan_masa_json(std::string_view text, const DesignStrategy& s,
                    const AspectSchema& schema, Scan& scan,
                    std::vector<MasaItem>& items) {
  std::vector<std::string_view> keys = {"aspect"};
  if (s.reasoning == Reasoning::CoT) keys.push_back("description");
  keys.push_back("sentiment");
  if (s.reasoning == Reasoning::RCoT) keys.push_back("description");

  for (const JsonPiece& piece : split_objects(text)) {
    if (!piece.object) {
      scan.add_junk(piece.text);
      continue;
    }
    ordered_json obj = ordered_json::parse(piece.text, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
      scan.add_junk(piece.text);
      continue;
    }
    RepairSet r;
    const ordered_json* aspect_v = find_key(obj, "aspect", r);
    if (!aspect_v || !aspect_v->is_string()) {
      scan.add_junk(piece.text);
      continue;
    }
    auto aspect = resolve_aspect(aspect_v->get<std::string>(), schema);
    if (!aspect) {
      scan.add_junk(piece.text);
      continue;
    }
    MasaItem item;
    item.aspect = aspect->index;
    item.repairs = r;
    item.repairs.merge(aspect->repairs);
    item.raw = piece.text;
    if (!canonical_object(obj, piece.text, keys)) scan.structure_ok = false;
    if (const ordered_json* v = find_key(obj, "sentiment", item.repairs)) {
      std::optional<LabelMatch> m;
      if (v->is_string()) {
        m = resolve_label(v->get<std::string>(), s, schema);
      } else if (v->is_number_integer()) {
        m = resolve_label(v->dump(), s, schema);
      } else if (v->is_null()) {
        m = resolve_label("null", s, schema);
      }
      if (m) {
        item.label = m->label;
        item.repairs.merge(m->repairs);
      }
    }
    scan.tokens.push_back({static_cast<int>(items.size()), {}});
    items.push_back(std::move(item));
  }
}

// Mentions from a Lines value; nullopt when the value is not a mention list.
std::optional<std::vector<std::string>> span_values(std::string_view rest,
                                                    const DesignStrategy& s,
                                                    RepairSet& r) {
  std::vector<std::string> out;
  if (rest == "[]") return out;
  for (std::string_view e : kEmptySynonyms) {
    if (text::iequals(rest, e)) {
      r.add(RepairKind::LabelSynonym);
      return out;
    }
  }
  const bool list = grammar::uses_list(s);
  std::string_view body = rest;
  if (wrapped(rest, "[", "]")) {
    body = text::trim(rest.substr(1, rest.size() - 2));
    if (!list) r.add(RepairKind::PunctuationVariant);
  } else if (list) {
    r.add(RepairKind::PunctuationVariant);
  }
  if (body.empty()) return out;
  for (std::string_view m : text::split(body, list ? "," : ";")) {
    std::string_view t = text::trim(m);
    if (!t.empty()) out.emplace_back(t);
  }
  if (text::join(out, list ? ", " : "; ") != body) r.add(RepairKind::WhitespaceNormalize);
  return out;
}

void scan_span_lines(std::string_view text, const DesignStrategy& s,
                     const AspectSchema& schema, Scan& scan,
                     std::vector<SpanItem>& items) {
  for (std::string_view line : text::split_lines(text)) {
    std::string_view key, rest;
    bool spacing_ok = true;
    if (!split_key(line, &key, &rest, &spacing_ok)) {
      scan.add_junk(line);
      continue;
    }
    auto type = resolve_aspect(key, schema);
    if (!type) {
      scan.add_junk(line);
      continue;
    }
    SpanItem item;
    item.type = type->index;
    item.repairs = type->repairs;
    if (!spacing_ok) item.repairs.add(RepairKind::WhitespaceNormalize);
    item.raw = std::string(line);
    item.surface.type = std::string(key);
    item.mentions = span_values(rest, s, item.repairs);
    if (item.mentions) item.surface.mentions = *item.mentions;
    scan.tokens.push_back({static_cast<int>(items.size()), {}});
    items.push_back(std::move(item));
  }
}

void scan_span_natural(std::string_view text, const AspectSchema& schema, Scan& scan,
                       std::vector<SpanItem>& items) {
  const auto spellings = aspect_spellings(schema);
  std::size_t p = 0;
  while (p < text.size()) {
    while (p < text.size() && text[p] == ' ') ++p;
    if (p >= text.size()) break;
    SpanItem item;
    std::size_t end = std::string_view::npos;
    if (auto hit = match_aspect_at(text, p, " is not mentioned", spellings, schema)) {
      item.type = hit->index;
      item.repairs = hit->repairs;
      item.surface.type = std::string(text.substr(p, hit->length));
      item.mentions.emplace();
      end = p + hit->length + 17;
      if (end >= text.size() || text[end] != '.') scan.structure_ok = false;
    } else if (text::istarts_with(text.substr(p), grammar::kSpanNaturalLead)) {
      const std::size_t q = p + grammar::kSpanNaturalLead.size();
      if (auto hit2 = match_aspect_at(text, q, grammar::kSpanNaturalAre, spellings, schema)) {
        item.type = hit2->index;
        item.repairs = hit2->repairs;
        item.surface.type = std::string(text.substr(q, hit2->length));
        std::size_t i = q + hit2->length + grammar::kSpanNaturalAre.size();
        std::vector<std::string> mentions;
        while (i < text.size() && text[i] == '"') {
          const std::size_t close = text.find('"', i + 1);
          if (close == std::string_view::npos) break;
          mentions.emplace_back(text.substr(i + 1, close - i - 1));
          i = close + 1;
          if (text.substr(i, 2) == ", " && i + 2 < text.size() && text[i + 2] == '"') i += 2;
        }
        end = i;
        if (end >= text.size() || text[end] != '.') {
          scan.structure_ok = false;
          end = sentence_end(text, i);
          if (end > i) item.repairs.add(RepairKind::TrailingTextStripped);
        }
        if (mentions.empty()) {
          item.mentions.reset();
        } else {
          item.mentions = mentions;
          item.surface.mentions = mentions;
        }
      }
    }
    if (end == std::string_view::npos) {
      const std::size_t e = sentence_end(text, p);
      scan.add_junk(text.substr(p, std::min(e + 1, text.size()) - p));
      p = e + 1;
      continue;
    }
    item.raw = std::string(text.substr(p, std::min(end + 1, text.size()) - p));
    scan.tokens.push_back({static_cast<int>(items.size()), {}});
    items.push_back(std::move(item));
    p = end + 1;
  }
}

void scan_span_json(std::string_view text, const AspectSchema& schema, Scan& scan,
                    std::vector<SpanItem>& items) {
  for (const JsonPiece& piece : split_objects(text)) {
    if (!piece.object) {
      scan.add_junk(piece.text);
      continue;
    }
    ordered_json obj = ordered_json::parse(piece.text, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
      scan.add_junk(piece.text);
      continue;
    }
    RepairSet r;
    const ordered_json* type_v = find_key(obj, "type", r);
    if (!type_v || !type_v->is_string()) {
      scan.add_junk(piece.text);
      continue;
    }
    auto type = resolve_aspect(type_v->get<std::string>(), schema);
    if (!type) {
      scan.add_junk(piece.text);
      continue;
    }
    SpanItem item;
    item.type = type->index;
    item.repairs = r;
    item.repairs.merge(type->repairs);
    item.raw = piece.text;
    if (!canonical_object(obj, piece.text, {"type", "mentions"})) scan.structure_ok = false;
    if (const ordered_json* m = find_key(obj, "mentions", item.repairs)) {
      if (m->is_array()) {
        std::vector<std::string> mentions;
        bool ok = true;
        for (const auto& e : *m) {
          if (!e.is_string()) {
            ok = false;
            break;
          }
          mentions.push_back(e.get<std::string>());
        }
        if (ok) item.mentions = mentions;
      } else if (m->is_string()) {
        item.repairs.add(RepairKind::JsonQuoteRepair);
        item.mentions = std::vector<std::string>{m->get<std::string>()};
      } else if (m->is_null()) {
        item.repairs.add(RepairKind::LabelSynonym);
        item.mentions.emplace();
      }
    }
    scan.tokens.push_back({static_cast<int>(items.size()), {}});
    items.push_back(std::move(item));
  }
}

// ---------------------------------------------------------------------------
// Assembly.

// Applies the whole-text passes for the format; returns the text to scan.
std::string prepare(std::string_view raw, const DesignStrategy& s, RepairSet& r) {
  const std::string original(text::trim(raw));
  std::string t;
  if (s.output_format == OutputFormat::Json) {
    t = normalize_json_space(original);
    if (t != original) r.add(RepairKind::WhitespaceNormalize);
    std::string p = ascii_outside_strings(t);
    if (p != t) r.add(RepairKind::PunctuationVariant);
    std::string q = repair_json(p);
    if (q != p) r.add(RepairKind::JsonQuoteRepair);
    return q;
  }
  t = normalize_plain(original, s.output_format == OutputFormat::Natural);
  if (t != original) r.add(RepairKind::WhitespaceNormalize);
  std::string p = grammar::ascii_punctuation(t, true);
  if (p != t) r.add(RepairKind::PunctuationVariant);
  return p;
}

// Prose outside the grammar is stripped wherever it sits.
void settle_junk(const Scan& scan, RepairSet& r, std::vector<std::string>& residue) {
  for (const auto& tok : scan.tokens) {
    if (tok.item >= 0) continue;
    residue.push_back(tok.junk);
    r.add(RepairKind::TrailingTextStripped);
  }
}

bool has_junk(const Scan& scan) {
  for (const auto& tok : scan.tokens) {
    if (tok.item < 0) return true;
  }
  return false;
}

void finish(ParseOutcome& out, const RepairSet& r, bool strict) {
  out.format_error = !strict;
  if (strict) {
    out.repairs.clear();
    if (r.has(RepairKind::CaseFold)) out.repairs.push_back(RepairKind::CaseFold);
  } else {
    out.repairs = r.list();
  }
}

ParseOutcome parse_masa(std::string_view raw, const DesignStrategy& s,
                        const AspectSchema& schema) {
  ParseOutcome out;
  out.kind = TaskKind::Masa;
  const std::size_t n = schema.aspects.size();
  RepairSet r;
  const std::string text = prepare(raw, s, r);
  const bool passes_clean = r.empty();

  if (s.unmentioned == UnmentionedHandling::OU && text::iequals(text, grammar::kNone)) {
    for (const auto& a : schema.aspects) out.labels.push_back({a, SentimentLabel::Unmentioned});
    if (text != grammar::kNone) r.add(RepairKind::CaseFold);
    finish(out, r, passes_clean);
    return out;
  }

  Scan scan;
  std::vector<MasaItem> items;
  switch (s.output_format) {
    case OutputFormat::Lines: scan_masa_lines(text, s, schema, scan, items); break;
    case OutputFormat::Natural:
      NaturalScanner(text, s, schema, scan, items).run();
      break;
    case OutputFormat::Json: scan_masa_json(text, s, schema, scan, items); break;
  }

  std::vector<std::optional<SentimentLabel>> found(n);
  std::vector<bool> unresolved(n, false);
  std::vector<std::string> residue;
  std::vector<grammar::MasaEntry> surfaces;
  for (const MasaItem& item : items) {
    if (!item.label) {
      unresolved[item.aspect] = true;
      residue.push_back(item.raw);
      continue;
    }
    if (found[item.aspect]) {
      r.add(RepairKind::DuplicateAspectFirstWins);
      residue.push_back(item.raw);
      continue;
    }
    found[item.aspect] = item.label;
    r.merge(item.repairs);
    surfaces.push_back(item.surface);
  }
  settle_junk(scan, r, residue);
  for (std::size_t i = 0; i < n; ++i) {
    if (!found[i] && (s.unmentioned == UnmentionedHandling::PU || unresolved[i])) {
      r.add(RepairKind::MissingAspectDefaulted);
    }
    out.labels.push_back({schema.aspects[i], found[i].value_or(SentimentLabel::Unmentioned)});
  }
  out.residue = text::join(residue, "\n");

  bool strict = passes_clean && scan.structure_ok && !has_junk(scan) && r.at_most_case() &&
                !surfaces.empty();
  if (strict && s.output_format != OutputFormat::Json) {
    strict = grammar::serialize_masa(surfaces, s) == text;
  }
  finish(out, r, strict);
  return out;
}

ParseOutcome parse_span(std::string_view raw, const DesignStrategy& s,
                        const AspectSchema& schema) {
  ParseOutcome out;
  out.kind = TaskKind::Span;
  const std::size_t n = schema.aspects.size();
  RepairSet r;
  const std::string text = prepare(raw, s, r);
  const bool passes_clean = r.empty();

  if (s.unmentioned == UnmentionedHandling::OU && text::iequals(text, grammar::kNone)) {
    if (text != grammar::kNone) r.add(RepairKind::CaseFold);
    finish(out, r, passes_clean);
    return out;
  }

  Scan scan;
  std::vector<SpanItem> items;
  switch (s.output_format) {
    case OutputFormat::Lines: scan_span_lines(text, s, schema, scan, items); break;
    case OutputFormat::Natural: scan_span_natural(text, schema, scan, items); break;
    case OutputFormat::Json: scan_span_json(text, schema, scan, items); break;
  }

  std::vector<std::optional<std::vector<std::string>>> found(n);
  std::vector<bool> unresolved(n, false);
  std::vector<std::string> residue;
  std::vector<grammar::SpanEntry> surfaces;
  for (const SpanItem& item : items) {
    if (!item.mentions) {
      unresolved[item.type] = true;
      residue.push_back(item.raw);
      continue;
    }
    if (found[item.type]) {
      r.add(RepairKind::DuplicateAspectFirstWins);
      residue.push_back(item.raw);
      continue;
    }
    found[item.type] = item.mentions;
    r.merge(item.repairs);
    surfaces.push_back(item.surface);
  }
  settle_junk(scan, r, residue);
  for (std::size_t i = 0; i < n; ++i) {
    if (!found[i]) {
      if (s.unmentioned == UnmentionedHandling::PU || unresolved[i]) {
        r.add(RepairKind::MissingAspectDefaulted);
      }
      continue;
    }
    for (const std::string& m : *found[i]) out.spans.push_back({schema.aspects[i], m, {}, {}});
  }
  out.residue = text::join(residue, "\n");

  bool strict = passes_clean && scan.structure_ok && !has_junk(scan) && r.at_most_case() &&
                !surfaces.empty();
  if (strict && s.output_format != OutputFormat::Json) {
    strict = grammar::serialize_span(surfaces, s) == text;
  }
  finish(out, r, strict);
  return out;
}

}  // namespace

std::string_view repair_name(RepairKind kind) {
  return kRepairNames[static_cast<std::size_t>(kind)];
}

std::optional<RepairKind> repair_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kRepairNames.size(); ++i) {
    if (kRepairNames[i] == name) return static_cast<RepairKind>(i);
  }
  return std::nullopt;
}

std::string_view repair_table_version() { return kTableVersion; }

std::optional<SentimentLabel> ParseOutcome::label_of(std::string_view aspect) const {
  for (const auto& al : labels) {
    if (al.aspect == aspect) return al.label;
  }
  return std::nullopt;
}

ParseOutcome parse_output(std::string_view text, const DesignStrategy& strategy,
                          const AspectSchema& schema, TaskKind kind) {
  if (auto problems = validate_schema(schema); !problems.empty()) {
    throw ValidationError("invalid schema: " + text::join(problems, "; "));
  }
  return kind == TaskKind::Masa ? parse_masa(text, strategy, schema)
                                : parse_span(text, strategy, schema);
}

std::vector<std::pair<std::string, ParseOutcome>> batch_parse(
    const std::vector<RawOutput>& outputs, const DesignStrategy& strategy,
    const AspectSchema& schema, TaskKind kind) {
  std::unordered_set<std::string> seen;
  for (const RawOutput& o : outputs) {
    if (!seen.insert(o.id).second) {
      throw ValidationError("duplicate prediction id '" + o.id + "'");
    }
  }
  std::vector<std::pair<std::string, ParseOutcome>> out;
  out.reserve(outputs.size());
  for (const RawOutput& o : outputs) {
    out.emplace_back(o.id, parse_output(o.text, strategy, schema, kind));
  }
  return out;
}

std::vector<RawOutput> parse_prediction_jsonl(std::string_view jsonl) {
  std::vector<RawOutput> out;
  std::size_t line_no = 0;
  for (std::string_view line : text::split_lines(jsonl)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    ordered_json obj = ordered_json::parse(line, nullptr, false);
    const std::string where = "prediction line " + std::to_string(line_no);
    if (obj.is_discarded() || !obj.is_object()) {
      throw ValidationError(where + ": malformed JSON");
    }
    auto id = obj.find("id");
    auto output = obj.find("output");
    if (id == obj.end() || !id->is_string()) {
      throw ValidationError(where + ": missing string field \"id\"");
    }
    if (output == obj.end() || !output->is_string()) {
      throw ValidationError(where + ": missing string field \"output\"");
    }
    out.push_back({id->get<std::string>(), output->get<std::string>()});
  }
  return out;
}

std::vector<RawOutput> load_predictions(const std::filesystem::path& path) {
  return parse_prediction_jsonl(text::read_file(path));
}

std::string outcome_to_json(const std::string& id, const ParseOutcome& o) {
  ordered_json obj;
  obj["id"] = id;
  if (o.kind == TaskKind::Masa) {
    ordered_json labels = ordered_json::object();
    for (const auto& al : o.labels) labels[al.aspect] = label_name(al.label);
    obj["labels"] = labels;
  } else {
    ordered_json spans = ordered_json::array();
    for (const auto& sp : o.spans) spans.push_back({{"type", sp.type}, {"mention", sp.mention}});
    obj["spans"] = spans;
  }
  obj["format_error"] = o.format_error;
  ordered_json repairs = ordered_json::array();
  for (RepairKind k : o.repairs) repairs.push_back(repair_name(k));
  obj["repairs"] = repairs;
  obj["residue"] = o.residue;
  // Model output need not be valid UTF-8.
  return obj.dump(-1, ' ', false, ordered_json::error_handler_t::replace);
}

}  // namespace sde
