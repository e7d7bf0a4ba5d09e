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
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "sdekit/design.hpp"
#include "sdekit/schema.hpp"

namespace sde {

struct PromptTemplate {
  TaskKind kind = TaskKind::Masa;
  // Each variant uses the slots {aspect_list}, {format_clause} and
  // {unmentioned_clause}. Variant 0 is the default wording.
  std::vector<std::string> instructions;
  std::string text_preamble;
  // Keyed "<format>/<labelstyle>/<unmentioned>", e.g. "lines_of_list/txt/ou".
  // Clauses may use {labels} and {placeholder}.
  std::map<std::string, std::string> format_clauses;
  // Keyed "<format>/<unmentioned>".
  std::map<std::string, std::string> unmentioned_clauses;
  // Keyed "cot" / "rcot"; appended to the instruction.
  std::map<std::string, std::string> reasoning_clauses;
};

PromptTemplate default_template(TaskKind kind);
std::vector<std::string> validate_template(const PromptTemplate& tmpl);
PromptTemplate template_from_json(std::string_view json_text);
PromptTemplate load_template(const std::filesystem::path& path);
std::string template_to_json(const PromptTemplate& tmpl);

struct TrainingSample {
  std::string id;
  std::string prompt;
  std::string response;
  bool train_on_input = false;
  DesignStrategy strategy;
  std::size_t instruction_variant = 0;
};

// The filled instruction text for a strategy and variant.
std::string render_instruction(const AspectSchema& schema,
                               const DesignStrategy& strategy,
                               const PromptTemplate& tmpl,
                               std::size_t variant);

// Prompt only (no response); the zero-shot evaluation prompt.
std::string render_prompt(const TaskRecord& record, const AspectSchema& schema,
                          const DesignStrategy& strategy,
                          const PromptTemplate& tmpl, std::size_t variant);

// Throws ValidationError when a CoT rationale is missing for a mentioned
// aspect, when a record does not fit the schema, or when a span mention
// cannot be written unambiguously in the chosen format.
std::string render_response(const TaskRecord& record, const AspectSchema& schema,
                            const DesignStrategy& strategy);

TrainingSample render_sample(const TaskRecord& record, const AspectSchema& schema,
                             const DesignStrategy& strategy,
                             const PromptTemplate& tmpl, std::size_t variant);

// Fails on the first record that cannot be rendered, citing its id.
std::vector<TrainingSample> render_corpus(const std::vector<TaskRecord>& records,
                                          const AspectSchema& schema,
                                          const DesignStrategy& strategy,
                                          const PromptTemplate& tmpl,
                                          std::size_t variant);

// Zero-shot when `exemplars` is empty; otherwise each exemplar's prompt and
// response, blank-line separated, precede the test prompt.
std::string render_eval_prompt(const TaskRecord& record,
                               const AspectSchema& schema,
                               const DesignStrategy& strategy,
                               const PromptTemplate& tmpl,
                               const std::vector<TaskRecord>& exemplars,
                               std::size_t variant);

std::string sample_to_json(const TrainingSample& sample);

}  // namespace sde
