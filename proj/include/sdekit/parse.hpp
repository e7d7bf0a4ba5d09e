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

// Recovers structured predictions from raw model output.
//
// A strict pass decides format adherence: the output must be exactly what the
// renderer would have produced, except that aspect and label tokens may differ
// in case (reported as CaseFold without a format error), NumLabel values may
// carry quotes, and aspects may come in any order. When it fails, a relaxed
// pass applies the repair rules below and defaults whatever is still missing
// to Unmentioned. Repairs are reported once each, in rule order.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sdekit/design.hpp"
#include "sdekit/schema.hpp"

namespace sde {

enum class RepairKind {
  WhitespaceNormalize,       // R1 line endings, odd spaces, blank lines, spacing around ':' and '|'
  PunctuationVariant,        // R2 full-width punctuation, quote/bracket wrappers
  CaseFold,                  // R3
  LabelSynonym,              // R4
  AspectAlias,               // R5
  JsonQuoteRepair,           // R6 smart/single quotes, bare keys, trailing commas, fences, arrays
  TrailingTextStripped,      // R7
  DuplicateAspectFirstWins,  // R8
  MissingAspectDefaulted,    // R9
};

inline constexpr int kRepairKindCount = 9;

std::string_view repair_name(RepairKind kind);
std::optional<RepairKind> repair_from_name(std::string_view name);

// Version tag of the built-in label-synonym and aspect-alias tables.
std::string_view repair_table_version();

struct ParseOutcome {
  TaskKind kind = TaskKind::Masa;
  // MASA: one entry per schema aspect, schema order.
  std::vector<AspectLabel> labels;
  // Span tasks: (type, mention) in schema type order, then output order.
  std::vector<Span> spans;
  bool format_error = false;
  std::vector<RepairKind> repairs;
  // Text the relaxed pass could not use, one piece per line.
  std::string residue;

  std::optional<SentimentLabel> label_of(std::string_view aspect) const;
};

// Never throws on bad model output; only on an unusable schema.
ParseOutcome parse_output(std::string_view text, const DesignStrategy& strategy,
                          const AspectSchema& schema,
                          TaskKind kind = TaskKind::Masa);

struct RawOutput {
  std::string id;
  std::string text;
};

// Order-preserving. Throws ValidationError on a duplicate id.
std::vector<std::pair<std::string, ParseOutcome>> batch_parse(
    const std::vector<RawOutput>& outputs, const DesignStrategy& strategy,
    const AspectSchema& schema, TaskKind kind = TaskKind::Masa);

// {"id","output"} JSON lines.
std::vector<RawOutput> parse_prediction_jsonl(std::string_view jsonl);
std::vector<RawOutput> load_predictions(const std::filesystem::path& path);

std::string outcome_to_json(const std::string& id, const ParseOutcome& outcome);

}  // namespace sde
