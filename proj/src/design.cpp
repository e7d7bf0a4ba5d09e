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

#include "sdekit/design.hpp"

#include <array>
#include <utility>

#include "sdekit/errors.hpp"
#include "text_util.hpp"

namespace sde {

namespace {

template <typename E, std::size_t N>
using TokenTable = std::array<std::pair<E, std::string_view>, N>;

constexpr TokenTable<Placement, 3> kPlacementTokens = {{
    {Placement::InstFirst, "inst_first"},
    {Placement::InstLast, "inst_last"},
    {Placement::NoInst, "no_inst"},
}};
constexpr TokenTable<InputModeling, 2> kModelingTokens = {{
    {InputModeling::MI, "mi"},
    {InputModeling::NoMI, "no_mi"},
}};
constexpr TokenTable<OutputFormat, 3> kFormatTokens = {{
    {OutputFormat::Natural, "natural"},
    {OutputFormat::Lines, "lines"},
    {OutputFormat::Json, "json"},
}};
constexpr TokenTable<UnmentionedHandling, 2> kUnmentionedTokens = {{
    {UnmentionedHandling::PU, "pu"},
    {UnmentionedHandling::OU, "ou"},
}};
constexpr TokenTable<LabelStyle, 2> kLabelTokens = {{
    {LabelStyle::Txt, "txt"},
    {LabelStyle::Num, "num"},
}};
constexpr TokenTable<Reasoning, 3> kReasoningTokens = {{
    {Reasoning::NoCoT, "no_cot"},
    {Reasoning::CoT, "cot"},
    {Reasoning::RCoT, "rcot"},
}};

template <typename E, std::size_t N>
std::string_view token_of(const TokenTable<E, N>& table, E value) {
  for (const auto& [v, t] : table) {
    if (v == value) return t;
  }
  return "?";
}

template <typename E, std::size_t N>
E value_of(const TokenTable<E, N>& table, std::string_view token,
           const char* axis) {
  for (const auto& [v, t] : table) {
    if (t == token) return v;
  }
  std::string known;
  for (const auto& [v, t] : table) {
    if (!known.empty()) known += ", ";
    known += t;
  }
  throw ValidationError("unknown " + std::string(axis) + " '" +
                        std::string(token) + "' (expected one of " + known + ")");
}

struct NamedPreset {
  std::string_view name;
  DesignStrategy strategy;
};

const std::array<NamedPreset, 3>& presets() {
  static const std::array<NamedPreset, 3> table = {{
      {"ES-SDE",
       {Placement::InstFirst, InputModeling::NoMI, OutputFormat::Lines,
        UnmentionedHandling::PU, LabelStyle::Txt, Reasoning::NoCoT, false}},
      {"EW-SDE",
       {Placement::InstLast, InputModeling::NoMI, OutputFormat::Natural,
        UnmentionedHandling::OU, LabelStyle::Txt, Reasoning::NoCoT, false}},
      {"Heuristic",
       {Placement::InstFirst, InputModeling::NoMI, OutputFormat::Lines,
        UnmentionedHandling::OU, LabelStyle::Txt, Reasoning::NoCoT, true}},
  }};
  return table;
}

}  // namespace

std::string to_string(const DesignStrategy& s) {
  std::string out;
  out += token_of(kPlacementTokens, s.placement);
  out += '/';
  out += token_of(kModelingTokens, s.input_modeling);
  out += '/';
  if (s.output_format == OutputFormat::Lines && s.list_values) {
    out += "lines_of_list";
  } else {
    out += token_of(kFormatTokens, s.output_format);
  }
  out += '/';
  out += token_of(kUnmentionedTokens, s.unmentioned);
  out += '/';
  out += token_of(kLabelTokens, s.label_style);
  out += '/';
  out += token_of(kReasoningTokens, s.reasoning);
  return out;
}

DesignStrategy parse_strategy(std::string_view text_in) {
  std::string_view text = text::trim(text_in);
  for (const auto& p : presets()) {
    if (text::iequals(text, p.name)) return p.strategy;
  }
  auto parts = text::split(text, "/");
  if (parts.size() != 6) {
    throw ValidationError(
        "strategy '" + std::string(text) +
        "' is neither a preset nor of the form "
        "placement/modeling/format/unmentioned/labelstyle/reasoning");
  }
  DesignStrategy s;
  s.placement = value_of(kPlacementTokens, parts[0], "placement");
  s.input_modeling = value_of(kModelingTokens, parts[1], "input modeling");
  if (parts[2] == "lines_of_list") {
    s.output_format = OutputFormat::Lines;
    s.list_values = true;
  } else {
    s.output_format = value_of(kFormatTokens, parts[2], "output format");
  }
  s.unmentioned = value_of(kUnmentionedTokens, parts[3], "unmentioned handling");
  s.label_style = value_of(kLabelTokens, parts[4], "label style");
  s.reasoning = value_of(kReasoningTokens, parts[5], "reasoning");
  return s;
}

DesignStrategy preset(std::string_view name) {
  for (const auto& p : presets()) {
    if (p.name == name) return p.strategy;
  }
  throw ValidationError("unknown preset '" + std::string(name) +
                        "' (known: ES-SDE, EW-SDE, Heuristic)");
}

std::vector<std::string_view> preset_names() {
  std::vector<std::string_view> out;
  for (const auto& p : presets()) out.push_back(p.name);
  return out;
}

int axis_distance(const DesignStrategy& a, const DesignStrategy& b) {
  const bool a_list = a.output_format == OutputFormat::Lines && a.list_values;
  const bool b_list = b.output_format == OutputFormat::Lines && b.list_values;
  return (a.placement != b.placement) + (a.input_modeling != b.input_modeling) +
         (a.output_format != b.output_format || a_list != b_list) +
         (a.unmentioned != b.unmentioned) + (a.label_style != b.label_style) +
         (a.reasoning != b.reasoning);
}

std::vector<DesignStrategy> enumerate_design_space() {
  std::vector<DesignStrategy> out;
  out.reserve(216);
  for (const auto& [p, _p] : kPlacementTokens)
    for (const auto& [m, _m] : kModelingTokens)
      for (const auto& [f, _f] : kFormatTokens)
        for (const auto& [u, _u] : kUnmentionedTokens)
          for (const auto& [l, _l] : kLabelTokens)
            for (const auto& [r, _r] : kReasoningTokens)
              out.push_back({p, m, f, u, l, r, false});
  return out;
}

std::string_view group_name(OptionGroup group) {
  switch (group) {
    case OptionGroup::Input: return "Input";
    case OptionGroup::Output: return "Output";
    case OptionGroup::Reasoning: return "Reasoning";
  }
  return "?";
}

OptionGroup parse_group(std::string_view name) {
  for (OptionGroup g : {OptionGroup::Input, OptionGroup::Output, OptionGroup::Reasoning}) {
    if (text::iequals(name, group_name(g))) return g;
  }
  throw ValidationError("unknown option group '" + std::string(name) +
                        "' (expected input, output or reasoning)");
}

std::string_view option_label(Placement v) {
  switch (v) {
    case Placement::InstFirst: return "Inst-first";
    case Placement::InstLast: return "Inst-last";
    case Placement::NoInst: return "No-inst";
  }
  return "?";
}

std::string_view option_label(InputModeling v) {
  return v == InputModeling::MI ? "MI" : "No-MI";
}

std::string_view option_label(OutputFormat v) {
  switch (v) {
    case OutputFormat::Natural: return "Natural";
    case OutputFormat::Lines: return "Lines";
    case OutputFormat::Json: return "JSON";
  }
  return "?";
}

std::string_view option_label(UnmentionedHandling v) {
  return v == UnmentionedHandling::PU ? "PU" : "OU";
}

std::string_view option_label(LabelStyle v) {
  return v == LabelStyle::Txt ? "TxtLabel" : "NumLabel";
}

std::string_view option_label(Reasoning v) {
  switch (v) {
    case Reasoning::NoCoT: return "No-CoT";
    case Reasoning::CoT: return "CoT";
    case Reasoning::RCoT: return "R-CoT";
  }
  return "?";
}

AblationGrid ablation_grid(const DesignStrategy& baseline, OptionGroup group) {
  AblationGrid grid;
  grid.group = group;
  grid.baseline = baseline;
  auto add = [&grid](std::string_view label, DesignStrategy s) {
    grid.variants.push_back({std::string(label), s});
  };

  switch (group) {
    case OptionGroup::Input: {
      grid.baseline_label = std::string(option_label(baseline.placement)) + ", " +
                            std::string(option_label(baseline.input_modeling));
      for (Placement p : {Placement::InstFirst, Placement::InstLast, Placement::NoInst}) {
        if (p == baseline.placement) continue;
        DesignStrategy s = baseline;
        s.placement = p;
        add(option_label(p), s);
      }
      DesignStrategy s = baseline;
      s.input_modeling = baseline.input_modeling == InputModeling::MI ? InputModeling::NoMI
                                                                      : InputModeling::MI;
      add(option_label(s.input_modeling), s);
      break;
    }
    case OptionGroup::Output: {
      std::string format_label(option_label(baseline.output_format));
      if (baseline.output_format == OutputFormat::Lines && baseline.list_values) {
        format_label = "Lines-of-list";
      }
      grid.baseline_label = format_label + ", " +
                            std::string(option_label(baseline.label_style)) + ", " +
                            std::string(option_label(baseline.unmentioned));
      for (OutputFormat f : {OutputFormat::Natural, OutputFormat::Lines, OutputFormat::Json}) {
        if (f == baseline.output_format) continue;
        DesignStrategy s = baseline;
        s.output_format = f;
        s.list_values = false;
        add(option_label(f), s);
      }
      DesignStrategy by_label = baseline;
      by_label.label_style =
          baseline.label_style == LabelStyle::Txt ? LabelStyle::Num : LabelStyle::Txt;
      add(option_label(by_label.label_style), by_label);
      DesignStrategy by_unmentioned = baseline;
      by_unmentioned.unmentioned = baseline.unmentioned == UnmentionedHandling::PU
                                       ? UnmentionedHandling::OU
                                       : UnmentionedHandling::PU;
      add(option_label(by_unmentioned.unmentioned), by_unmentioned);
      break;
    }
    case OptionGroup::Reasoning: {
      grid.baseline_label = std::string(option_label(baseline.reasoning));
      for (Reasoning r : {Reasoning::NoCoT, Reasoning::CoT, Reasoning::RCoT}) {
        if (r == baseline.reasoning) continue;
        DesignStrategy s = baseline;
        s.reasoning = r;
        add(option_label(r), s);
      }
      break;
    }
  }
  return grid;
}

std::vector<std::string> validate_strategy(const DesignStrategy& strategy,
                                           bool has_rationales) {
  std::vector<std::string> out;
  if (strategy.reasoning != Reasoning::NoCoT && !has_rationales) {
    out.emplace_back("reasoning requires rationales");
  }
  return out;
}

}  // namespace sde
