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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sdekit/design.hpp"
#include "sdekit/metrics.hpp"
#include "sdekit/render.hpp"
#include "sdekit/schema.hpp"

namespace sde {

struct RunManifest {
  std::string run_id;
  // A built-in schema name unless `schema_path` is set.
  std::string task_id;
  std::optional<std::string> schema_path;
  TaskKind task_kind = TaskKind::Masa;
  DesignStrategy strategy;
  std::size_t train_size = 0;
  std::size_t instruction_variant = 0;
  // Leading training records reused as in-context examples for evaluation.
  std::size_t icl_examples = 0;
  std::optional<std::uint64_t> decode_seed;
  // Grid bookkeeping, empty for standalone runs.
  std::string group;
  std::string option_label;
  std::string baseline_label;
  std::string cell;
  // A JSON object, passed through untouched.
  std::string trainer_metadata = default_trainer_metadata();

  static std::string default_trainer_metadata();
};

std::string manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(std::string_view json_text);
RunManifest load_manifest(const std::filesystem::path& path);
AspectSchema manifest_schema(const RunManifest& m);

// One manifest per grid row, baseline first. Run ids are
// "<prefix>-<index>"; the rest of `base` is copied.
std::vector<RunManifest> grid_manifests(const RunManifest& base, OptionGroup group,
                                        std::string_view run_id_prefix);

struct EmitPaths {
  std::filesystem::path samples;
  std::filesystem::path eval_prompts;
  std::filesystem::path test_gold;
  std::filesystem::path manifest;
};

// Writes <run_id>.samples.jsonl (the first train_size records),
// <run_id>.eval.jsonl ({"id","prompt"} per test record),
// <run_id>.test.jsonl (the test records) and <run_id>.manifest.json.
EmitPaths emit_run(const RunManifest& manifest, const std::vector<TaskRecord>& corpus,
                   const std::vector<TaskRecord>& test, const PromptTemplate& tmpl,
                   const std::filesystem::path& out_dir);

struct AspectKappa {
  std::string aspect;
  // Empty when that aspect's marginals are degenerate.
  std::optional<KappaResult> kappa;
};

struct EvalReport {
  std::string run_id;
  TaskKind task_kind = TaskKind::Masa;
  std::string strategy;
  std::string group;
  std::string option_label;
  std::string baseline_label;
  std::string cell;
  std::size_t n = 0;
  double error_rate = 0;
  std::optional<KappaResult> kappa;
  std::optional<double> accuracy;
  std::vector<AspectKappa> per_aspect_kappa;
  std::optional<ConfusionMatrix> confusion;
  std::optional<MatchScore> f1_hard;
  std::optional<MatchScore> f1_soft;

  // Kappa for MASA, soft F1 for span tasks.
  double headline() const;
};

// Predictions must cover exactly the gold ids.
EvalReport score_run(const RunManifest& manifest, const std::vector<TaskRecord>& gold,
                     const std::vector<RawOutput>& predictions);
EvalReport score_run(const RunManifest& manifest, const AspectSchema& schema,
                     const std::vector<TaskRecord>& gold,
                     const std::vector<RawOutput>& predictions);

std::string report_to_json(const EvalReport& r);
EvalReport report_from_json(std::string_view json_text);

using LabelScore = std::pair<std::string, double>;

// metric(label) - metric(baseline), input order.
std::vector<LabelScore> compare_to_baseline(const std::vector<LabelScore>& scores,
                                            std::string_view baseline);

// One cell (e.g. model x task x train size): option label -> score.
using ScoreCell = std::map<std::string, double>;

// Mean over cells of compare_to_baseline for `label`; every cell must score
// both labels.
double average_delta(const std::vector<ScoreCell>& cells, std::string_view label,
                     std::string_view baseline);

struct RankingSummary {
  std::vector<std::string> options;
  // Same order as `options`; 1 is best.
  std::vector<double> mean_rank;
  std::size_t cells = 0;
  std::size_t tied_cells = 0;

  double rank_of(std::string_view option) const;
};

// Ranks by descending score within each cell, ties sharing the average
// rank. Throws ValidationError when a cell misses one of `options`.
RankingSummary average_rankings(const std::vector<std::string>& options,
                                const std::vector<ScoreCell>& cells);

struct GroupReport {
  std::string group;
  std::string baseline;
  std::vector<std::string> options;
  std::vector<std::string> cells;
  // Mean delta over cells, per option.
  std::vector<double> mean_delta;
  RankingSummary ranking;
};

// Groups reports by (group, cell); reports without a group are skipped.
std::vector<GroupReport> summarize_reports(const std::vector<EvalReport>& reports);
std::string summary_to_json(const std::vector<GroupReport>& groups);
std::string summary_table(const std::vector<GroupReport>& groups);

std::vector<EvalReport> load_reports(const std::filesystem::path& dir);

}  // namespace sde
