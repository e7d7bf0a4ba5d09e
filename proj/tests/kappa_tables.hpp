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

// Reference per-option kappa tables, arranged as ranking cells.

#include <algorithm>
#include <string>
#include <vector>

#include "json.hpp"
#include "sdekit/harness.hpp"
#include "support.hpp"

namespace sde::testing {

struct KappaRow {
  std::string model;
  int train_size = 0;
  std::string group;
  std::string option;
  nlohmann::json kappa;
};

inline std::vector<KappaRow> kappa_rows() {
  const auto doc = nlohmann::json::parse(read_fixture("masa_kappa_tables.json"));
  std::vector<KappaRow> out;
  for (const auto& r : doc["rows"]) {
    out.push_back({r["model"], r["train_size"], r["group"], r["option"], r["kappa"]});
  }
  return out;
}

// One cell per (model, train size, in-domain task), options in table order.
inline std::vector<ScoreCell> id_cells(const std::string& group,
                                       std::vector<std::string>* options = nullptr) {
  std::vector<std::string> keys;
  std::vector<ScoreCell> cells;
  for (const KappaRow& r : kappa_rows()) {
    if (r.group != group) continue;
    if (options && std::find(options->begin(), options->end(), r.option) == options->end()) {
      options->push_back(r.option);
    }
    for (const char* task : {"D1->D1", "D2->D2"}) {
      if (r.kappa[task].is_null()) continue;
      const std::string key = r.model + "/" + std::to_string(r.train_size) + "/" + task;
      auto it = std::find(keys.begin(), keys.end(), key);
      if (it == keys.end()) {
        keys.push_back(key);
        cells.emplace_back();
        it = keys.end() - 1;
      }
      cells[static_cast<std::size_t>(it - keys.begin())][r.option] = r.kappa[task].get<double>();
    }
  }
  return cells;
}

}  // namespace sde::testing
