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

// Task-agnostic data model for annotated corpora: multi-aspect sentiment
// records (MASA) and typed-span records (NER / event detection), the aspect
// schema they are validated against, JSON-lines I/O, and a seeded synthetic
// corpus generator driven by per-aspect label distributions.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace sde {

enum class SentimentLabel : std::uint8_t {
  Positive = 0,
  Neutral = 1,
  Negative = 2,
  Unmentioned = 3,
};

inline constexpr std::array<SentimentLabel, 4> kAllLabels = {
    SentimentLabel::Positive, SentimentLabel::Neutral,
    SentimentLabel::Negative, SentimentLabel::Unmentioned};

inline constexpr std::size_t label_index(SentimentLabel l) {
  return static_cast<std::size_t>(l);
}

// "positive", "neutral", "negative", "unmentioned".
std::string_view label_name(SentimentLabel label);
// Exact lower-case match on the four names above.
std::optional<SentimentLabel> label_from_name(std::string_view name);

enum class TaskKind { Masa, Span };

std::string_view task_kind_name(TaskKind kind);
TaskKind parse_task_kind(std::string_view name);

struct AspectSchema {
  std::string task_id;
  // Canonical rendering order. For span tasks these are the entity/event types.
  std::vector<std::string> aspects;
  // Indexed by label_index(); defaults positive=1, neutral=0, negative=-1,
  // unmentioned=99.
  std::array<std::string, 4> numeric_labels{"1", "0", "-1", "99"};
  std::string placeholder_token = "unmentioned";

  std::optional<std::size_t> index_of(std::string_view aspect) const;
  const std::string& numeric_label(SentimentLabel label) const {
    return numeric_labels[label_index(label)];
  }
};

// Empty when the schema is usable.
std::vector<std::string> validate_schema(const AspectSchema& schema);

AspectSchema load_schema(const std::filesystem::path& path);
AspectSchema schema_from_json(std::string_view json_text);
std::string schema_to_json(const AspectSchema& schema);

// "d1", "d2" (restaurant review domains) and "genia" (five entity types).
AspectSchema builtin_schema(std::string_view name);
std::vector<std::string_view> builtin_schema_names();

struct AspectLabel {
  std::string aspect;
  SentimentLabel label = SentimentLabel::Unmentioned;

  friend bool operator==(const AspectLabel&, const AspectLabel&) = default;
};

struct AspectText {
  std::string aspect;
  std::string text;

  friend bool operator==(const AspectText&, const AspectText&) = default;
};

struct MasaRecord {
  std::string id;
  std::string text;
  // File order is preserved so that load/save is byte-stable.
  std::vector<AspectLabel> labels;
  // Reasoning text per aspect, used by CoT / R-CoT rendering.
  std::optional<std::vector<AspectText>> rationales;

  std::optional<SentimentLabel> label_of(std::string_view aspect) const;
  const std::string* rationale_of(std::string_view aspect) const;

  friend bool operator==(const MasaRecord&, const MasaRecord&) = default;
};

struct Span {
  std::string type;
  std::string mention;
  // Byte offsets into the record text, end exclusive.
  std::optional<std::size_t> start;
  std::optional<std::size_t> end;

  friend bool operator==(const Span&, const Span&) = default;
};

struct SpanRecord {
  std::string id;
  std::string text;
  std::vector<Span> spans;

  friend bool operator==(const SpanRecord&, const SpanRecord&) = default;
};

using TaskRecord = std::variant<MasaRecord, SpanRecord>;

const std::string& record_id(const TaskRecord& record);
TaskKind record_kind(const TaskRecord& record);

// Per-aspect fractions indexed by label_index().
struct LabelDistribution {
  std::vector<std::pair<std::string, std::array<double, 4>>> per_aspect;

  const std::array<double, 4>* find(std::string_view aspect) const;
};

// Empty when every aspect's fractions are non-negative and sum to 1 (1e-9).
std::vector<std::string> validate_distribution(const LabelDistribution& dist);

// Fractions sum to 1 per aspect; accepts {"aspect": {"positive": f, ...}}.
LabelDistribution distribution_from_json(std::string_view json_text);
LabelDistribution load_distribution(const std::filesystem::path& path);

// "<domain>-<split>" with domain in {d1, d2} and split in
// {train500, train1000, test}.
LabelDistribution builtin_distribution(std::string_view name);
std::vector<std::string_view> builtin_distribution_names();

// Every violated invariant, not just the first. `schema` may be null, in
// which case only schema-independent checks run.
std::vector<std::string> validate_record(const TaskRecord& record,
                                         const AspectSchema* schema);

bool has_rationales(const TaskRecord& record);

// One record per JSON line, in file order. Throws ValidationError naming the
// line (malformed JSON) or the record (invariant violation); IoError when the
// file cannot be read. Blank lines are skipped.
std::vector<TaskRecord> load_corpus(const std::filesystem::path& path,
                                    TaskKind kind,
                                    const AspectSchema* schema);
std::vector<TaskRecord> parse_corpus(std::string_view jsonl, TaskKind kind,
                                     const AspectSchema* schema);

std::string record_to_json(const TaskRecord& record);
TaskRecord record_from_json(std::string_view json_line, TaskKind kind);
std::string corpus_to_jsonl(const std::vector<TaskRecord>& records);
void save_corpus(const std::vector<TaskRecord>& records,
                 const std::filesystem::path& path);

// Synthetic MASA corpus whose per-aspect label frequencies track `dist`.
// Pure function of its arguments: the same inputs give the same records on
// every platform.
std::vector<MasaRecord> generate_fixture_corpus(const AspectSchema& schema,
                                                const LabelDistribution& dist,
                                                std::size_t n,
                                                std::uint64_t seed);

}  // namespace sde
