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

// The sample-design option space: six axes, named presets, and single-option
// ablation grids.

#include <string>
#include <string_view>
#include <vector>

namespace sde {

enum class Placement { InstFirst, InstLast, NoInst };
enum class InputModeling { MI, NoMI };
enum class OutputFormat { Natural, Lines, Json };
enum class UnmentionedHandling { PU, OU };
enum class LabelStyle { Txt, Num };
enum class Reasoning { NoCoT, CoT, RCoT };

struct DesignStrategy {
  Placement placement = Placement::InstFirst;
  InputModeling input_modeling = InputModeling::NoMI;
  OutputFormat output_format = OutputFormat::Lines;
  UnmentionedHandling unmentioned = UnmentionedHandling::PU;
  LabelStyle label_style = LabelStyle::Txt;
  Reasoning reasoning = Reasoning::NoCoT;
  // "Lines-of-list" flavour of Lines: values are bracketed lists. Only
  // meaningful with OutputFormat::Lines.
  bool list_values = false;

  friend bool operator==(const DesignStrategy&, const DesignStrategy&) = default;
};

// Compact form "placement/modeling/format/unmentioned/labelstyle/reasoning",
// e.g. "inst_first/no_mi/lines/pu/txt/no_cot". The format token is
// "lines_of_list" when list_values is set.
std::string to_string(const DesignStrategy& strategy);
// Accepts the compact form or a preset name. Throws ValidationError.
DesignStrategy parse_strategy(std::string_view text);

// "ES-SDE", "EW-SDE" or "Heuristic"; throws ValidationError listing the known
// names otherwise.
DesignStrategy preset(std::string_view name);
std::vector<std::string_view> preset_names();

// Number of axes (out of six) on which the strategies differ. The format axis
// compares (output_format, list_values).
int axis_distance(const DesignStrategy& a, const DesignStrategy& b);

// All 3*2*3*2*2*3 = 216 strategies (list_values never set).
std::vector<DesignStrategy> enumerate_design_space();

enum class OptionGroup { Input, Output, Reasoning };

std::string_view group_name(OptionGroup group);
// Case-insensitive "input" / "output" / "reasoning".
OptionGroup parse_group(std::string_view name);

// Short option names as used in result tables: "Inst-first", "No-MI",
// "Lines", "NumLabel", "OU", "R-CoT", ...
std::string_view option_label(Placement v);
std::string_view option_label(InputModeling v);
std::string_view option_label(OutputFormat v);
std::string_view option_label(UnmentionedHandling v);
std::string_view option_label(LabelStyle v);
std::string_view option_label(Reasoning v);

struct GridVariant {
  std::string label;
  DesignStrategy strategy;
};

struct AblationGrid {
  OptionGroup group = OptionGroup::Input;
  // e.g. "Inst-last, No-MI" for the input group
  std::string baseline_label;
  DesignStrategy baseline;
  std::vector<GridVariant> variants;
};

// Variants differ from the baseline in exactly one axis.
//   Input:     the two other placements, then the other input modeling.
//   Output:    the two other formats, the other label style, the other
//              unmentioned handling.
//   Reasoning: the two other reasoning options.
AblationGrid ablation_grid(const DesignStrategy& baseline, OptionGroup group);

// Only reasoning is capability-dependent: CoT / R-CoT need rationales.
std::vector<std::string> validate_strategy(const DesignStrategy& strategy,
                                           bool has_rationales);

}  // namespace sde
