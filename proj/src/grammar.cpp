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

#include "grammar.hpp"

#include <array>

#include "json.hpp"
#include "text_util.hpp"

namespace sde::grammar {

using ordered_json = nlohmann::ordered_json;

std::string label_surface(SentimentLabel label, const DesignStrategy& s,
                          const AspectSchema& schema) {
  if (uses_list(s) && label == SentimentLabel::Unmentioned) return "[]";
  std::string bare;
  if (s.label_style == LabelStyle::Num) {
    bare = schema.numeric_label(label);
  } else if (label == SentimentLabel::Unmentioned) {
    bare = schema.placeholder_token;
  } else {
    bare = std::string(label_name(label));
  }
  return uses_list(s) ? "[" + bare + "]" : bare;
}

std::string label_vocabulary(const DesignStrategy& s, const AspectSchema& schema) {
  std::string out;
  for (SentimentLabel l : {SentimentLabel::Positive, SentimentLabel::Neutral,
                           SentimentLabel::Negative}) {
    if (!out.empty()) out += ", ";
    out += s.label_style == LabelStyle::Num ? schema.numeric_label(l)
                                            : std::string(label_name(l));
  }
  return out;
}

std::string placeholder_surface(const DesignStrategy& s,
                                const AspectSchema& schema) {
  return label_surface(SentimentLabel::Unmentioned, s, schema);
}

namespace {

struct WidePunct {
  std::string_view wide;
  char ascii;
  bool sentence;
};

constexpr std::array<WidePunct, 11> kWidePunct = {{
    {"\xEF\xBC\x9A", ':', true},   // full-width colon
    {"\xEF\xBC\x9B", ';', true},   // full-width semicolon
    {"\xEF\xBC\x8C", ',', true},   // full-width comma
    {"\xE3\x80\x81", ',', true},   // ideographic comma
    {"\xE3\x80\x82", '.', true},   // ideographic full stop
    {"\xEF\xBC\x81", '!', true},
    {"\xEF\xBC\x9F", '?', true},
    {"\xEF\xBD\x9C", '|', false},
    {"\xEF\xBC\x88", '(', false},
    {"\xEF\xBC\x89", ')', false},
    {"\xE3\x80\x90", '[', false},
}};

constexpr std::string_view kWideCloseBracket = "\xE3\x80\x91";

}  // namespace

std::string ascii_punctuation(std::string_view text, bool spaced) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (static_cast<unsigned char>(text[i]) < 0x80) {
      out += text[i++];
      continue;
    }
    bool replaced = false;
    for (const WidePunct& w : kWidePunct) {
      if (text.substr(i, w.wide.size()) != w.wide) continue;
      i += w.wide.size();
      out += w.ascii;
      if (spaced && w.sentence && i < text.size() && !text::is_space(text[i])) out += ' ';
      replaced = true;
      break;
    }
    if (!replaced && text.substr(i, kWideCloseBracket.size()) == kWideCloseBracket) {
      i += kWideCloseBracket.size();
      out += ']';
      replaced = true;
    }
    if (!replaced) out += text[i++];
  }
  return out;
}

std::string plain_spaces(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\r') {
      out += '\n';
      if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
    } else if (c == '\t' || c == '\f' || c == '\v') {
      out += ' ';
    } else if (text.substr(i, 2) == "\xC2\xA0") {
      out += ' ';
      ++i;
    } else if (text.substr(i, 3) == "\xE3\x80\x80") {
      out += ' ';
      i += 2;
    } else {
      out += c;
    }
  }
  return out;
}

std::string normalize_description(std::string_view text) {
  return text::collapse_whitespace(plain_spaces(ascii_punctuation(text, true)));
}

std::string masa_json_line(const MasaEntry& e, const DesignStrategy& s) {
  ordered_json obj;
  obj["aspect"] = e.aspect;
  if (s.reasoning == Reasoning::CoT) obj["description"] = e.description.value_or("");
  obj["sentiment"] = e.value;
  if (s.reasoning == Reasoning::RCoT) obj["description"] = e.description.value_or("");
  return obj.dump();
}

namespace {

std::string natural_sentence(const MasaEntry& e, const DesignStrategy& s) {
  std::string out;
  if (e.not_mentioned_sentence) {
    out = e.aspect;
    out += kNaturalNotMentioned;
    return out;
  }
  const std::string desc = e.description.value_or("");
  switch (s.reasoning) {
    case Reasoning::CoT:
      out += kNaturalCotLead;
      out += desc;
      out += kNaturalCotJoin;
      out += e.aspect;
      out += kNaturalIs;
      out += e.value;
      break;
    case Reasoning::RCoT:
      out += kNaturalLead;
      out += e.aspect;
      out += kNaturalIs;
      out += e.value;
      out += kNaturalBecause;
      out += desc;
      break;
    case Reasoning::NoCoT:
      out += kNaturalLead;
      out += e.aspect;
      out += kNaturalIs;
      out += e.value;
      break;
  }
  out += '.';
  return out;
}

std::string lines_row(const MasaEntry& e, const DesignStrategy& s) {
  std::string out = e.aspect + ": ";
  const std::string desc = e.description.value_or("");
  switch (s.reasoning) {
    case Reasoning::CoT: out += desc + " | " + e.value; break;
    case Reasoning::RCoT: out += e.value + " | " + desc; break;
    case Reasoning::NoCoT: out += e.value; break;
  }
  return out;
}

}  // namespace

std::string serialize_masa(const std::vector<MasaEntry>& entries,
                           const DesignStrategy& s) {
  if (entries.empty()) return std::string(kNone);
  std::string out;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    switch (s.output_format) {
      case OutputFormat::Natural:
        if (i) out += ' ';
        out += natural_sentence(entries[i], s);
        break;
      case OutputFormat::Lines:
        if (i) out += '\n';
        out += lines_row(entries[i], s);
        break;
      case OutputFormat::Json:
        if (i) out += '\n';
        out += masa_json_line(entries[i], s);
        break;
    }
  }
  return out;
}

std::string span_json_line(const SpanEntry& e) {
  ordered_json obj;
  obj["type"] = e.type;
  obj["mentions"] = e.mentions;
  return obj.dump();
}

std::string serialize_span(const std::vector<SpanEntry>& entries,
                           const DesignStrategy& s) {
  if (entries.empty()) return std::string(kNone);
  std::string out;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const SpanEntry& e = entries[i];
    switch (s.output_format) {
      case OutputFormat::Natural:
        if (i) out += ' ';
        if (e.mentions.empty()) {
          out += e.type;
          out += kNaturalNotMentioned;
        } else {
          out += kSpanNaturalLead;
          out += e.type;
          out += kSpanNaturalAre;
          for (std::size_t k = 0; k < e.mentions.size(); ++k) {
            if (k) out += ", ";
            out += '"' + e.mentions[k] + '"';
          }
          out += '.';
        }
        break;
      case OutputFormat::Lines:
        if (i) out += '\n';
        out += e.type + ": ";
        if (e.mentions.empty()) {
          out += "[]";
        } else if (uses_list(s)) {
          out += "[" + text::join(e.mentions, ", ") + "]";
        } else {
          out += text::join(e.mentions, "; ");
        }
        break;
      case OutputFormat::Json:
        if (i) out += '\n';
        out += span_json_line(e);
        break;
    }
  }
  return out;
}

}  // namespace sde::grammar
