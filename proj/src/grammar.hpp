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

#pragma once

// Response layouts shared by the renderer and the parser's strict check.
// Entries carry surface strings exactly as they appear in the text, so the
// parser can re-serialize what it read and compare byte for byte.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sdekit/design.hpp"
#include "sdekit/schema.hpp"

namespace sde::grammar {

inline constexpr std::string_view kNone = "none";

inline constexpr std::string_view kNaturalLead = "The sentiment toward ";
inline constexpr std::string_view kNaturalCotLead = "Because ";
inline constexpr std::string_view kNaturalCotJoin = ", the sentiment toward ";
inline constexpr std::string_view kNaturalIs = " is ";
inline constexpr std::string_view kNaturalBecause = " because ";
inline constexpr std::string_view kNaturalNotMentioned = " is not mentioned.";
inline constexpr std::string_view kUnmentionedDescription = "not mentioned";

inline constexpr std::string_view kSpanNaturalLead = "The ";
inline constexpr std::string_view kSpanNaturalAre = " mentions are ";

inline bool uses_list(const DesignStrategy& s) {
  return s.output_format == OutputFormat::Lines && s.list_values;
}

// Text form of a label in a value slot: label name or placeholder (Txt),
// numeric code (Num), bracketed under lines-of-list with "[]" standing for
// Unmentioned.
std::string label_surface(SentimentLabel label, const DesignStrategy& s,
                          const AspectSchema& schema);

// The "{labels}" / "{placeholder}" fillers for instruction clauses.
std::string label_vocabulary(const DesignStrategy& s, const AspectSchema& schema);
std::string placeholder_surface(const DesignStrategy& s,
                                const AspectSchema& schema);

// Full-width punctuation to ASCII. With `spaced`, sentence punctuation that
// is followed by a non-space character gains a space, as full-width forms
// carry their own spacing.
std::string ascii_punctuation(std::string_view text, bool spaced);

// CR/LF pairs, tabs, NBSP and ideographic spaces become plain spaces or
// newlines.
std::string plain_spaces(std::string_view text);

// Single-line, single-spaced, ASCII-punctuated description text.
std::string normalize_description(std::string_view text);

struct MasaEntry {
  std::string aspect;
  std::string value;
  std::optional<std::string> description;
  // Natural + PU: "{aspect} is not mentioned." (value unused)
  bool not_mentioned_sentence = false;
};

// "none" when there are no entries.
std::string serialize_masa(const std::vector<MasaEntry>& entries,
                           const DesignStrategy& s);
std::string masa_json_line(const MasaEntry& entry, const DesignStrategy& s);

struct SpanEntry {
  std::string type;
  std::vector<std::string> mentions;
};

std::string serialize_span(const std::vector<SpanEntry>& entries,
                           const DesignStrategy& s);
std::string span_json_line(const SpanEntry& entry);

}  // namespace sde::grammar
