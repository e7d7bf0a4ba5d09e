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


#include <set>

#include "doctest.h"
#include "sdekit/design.hpp"
#include "sdekit/errors.hpp"

using namespace sde;

TEST_CASE("design space has 216 distinct strategies") {
  const auto all = enumerate_design_space();
  CHECK(all.size() == 216);
  std::set<std::string> names;
  for (const auto& s : all) {
    names.insert(to_string(s));
    CHECK_FALSE(s.list_values);
  }
  CHECK(names.size() == 216);
}

TEST_CASE("compact strings roundtrip") {
  for (const auto& s : enumerate_design_space()) CHECK(parse_strategy(to_string(s)) == s);
  DesignStrategy list = preset("Heuristic");
  CHECK(list.list_values);
  CHECK(to_string(list) == "inst_first/no_mi/lines_of_list/ou/txt/no_cot");
  CHECK(parse_strategy(to_string(list)) == list);
}

TEST_CASE("presets") {
  CHECK(to_string(preset("ES-SDE")) == "inst_first/no_mi/lines/pu/txt/no_cot");
  CHECK(to_string(preset("EW-SDE")) == "inst_last/no_mi/natural/ou/txt/no_cot");
  CHECK(parse_strategy("es-sde") == preset("ES-SDE"));
  CHECK(preset_names().size() == 3);
  CHECK_THROWS_WITH_AS(preset("XX"), doctest::Contains("ES-SDE"), ValidationError);
}

TEST_CASE("malformed strategy strings") {
  CHECK_THROWS_AS(parse_strategy(""), ValidationError);
  CHECK_THROWS_AS(parse_strategy("inst_first/no_mi/lines/pu/txt"), ValidationError);
  CHECK_THROWS_WITH_AS(parse_strategy("inst_first/no_mi/yaml/pu/txt/no_cot"),
                       doctest::Contains("yaml"), ValidationError);
  CHECK_THROWS_AS(parse_strategy("inst_first/no_mi/lines/pu/txt/no_cot/extra"),
                  ValidationError);
}

TEST_CASE("axis distance") {
  const DesignStrategy a = preset("ES-SDE");
  CHECK(axis_distance(a, a) == 0);
  CHECK(axis_distance(a, preset("EW-SDE")) == 3);
  DesignStrategy list = a;
  list.list_values = true;
  CHECK(axis_distance(a, list) == 1);
}

TEST_CASE("ablation grids have the expected layout") {
  const DesignStrategy base = parse_strategy("inst_last/no_mi/natural/pu/txt/no_cot");
  struct Expect {
    OptionGroup group;
    std::string baseline;
    std::vector<std::string> variants;
  };
  const std::vector<Expect> expected = {
      {OptionGroup::Input, "Inst-last, No-MI", {"Inst-first", "No-inst", "MI"}},
      {OptionGroup::Output, "Natural, TxtLabel, PU", {"Lines", "JSON", "NumLabel", "OU"}},
      {OptionGroup::Reasoning, "No-CoT", {"CoT", "R-CoT"}},
  };
  for (const Expect& e : expected) {
    const AblationGrid g = ablation_grid(base, e.group);
    CHECK(g.baseline == base);
    CHECK(g.baseline_label == e.baseline);
    REQUIRE(g.variants.size() == e.variants.size());
    for (std::size_t i = 0; i < e.variants.size(); ++i) {
      CHECK(g.variants[i].label == e.variants[i]);
      CHECK(axis_distance(g.variants[i].strategy, base) == 1);
    }
  }
}

TEST_CASE("every grid variant is one axis away, from any baseline") {
  for (const auto& base : enumerate_design_space()) {
    for (OptionGroup g : {OptionGroup::Input, OptionGroup::Output, OptionGroup::Reasoning}) {
      const AblationGrid grid = ablation_grid(base, g);
      std::set<std::string> seen;
      for (const auto& v : grid.variants) {
        CHECK(axis_distance(v.strategy, base) == 1);
        CHECK(seen.insert(to_string(v.strategy)).second);
      }
    }
  }
}

TEST_CASE("groups parse case-insensitively") {
  CHECK(parse_group("OUTPUT") == OptionGroup::Output);
  CHECK(group_name(OptionGroup::Reasoning) == "Reasoning");
  CHECK_THROWS_AS(parse_group("style"), ValidationError);
}

TEST_CASE("reasoning needs rationales") {
  DesignStrategy s = preset("ES-SDE");
  CHECK(validate_strategy(s, false).empty());
  s.reasoning = Reasoning::CoT;
  CHECK(validate_strategy(s, true).empty());
  CHECK_FALSE(validate_strategy(s, false).empty());
}
