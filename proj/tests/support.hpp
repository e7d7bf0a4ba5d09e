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

// Shared helpers for tests and the acceptance binary.

#include <cstdint>
#include <fstream>
#include <iterator>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sdekit/parse.hpp"
#include "sdekit/render.hpp"
#include "sdekit/schema.hpp"

namespace sde::testing {

inline std::string read_fixture(const std::string& name) {
  std::ifstream in(std::string(SDEKIT_FIXTURE_DIR) + "/" + name, std::ios::binary);
  if (!in) throw std::runtime_error("missing fixture " + name);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::vector<MasaRecord> d1_corpus(std::size_t n, std::uint64_t seed) {
  return generate_fixture_corpus(builtin_schema("d1"),
                                 builtin_distribution("d1-train500"), n, seed);
}

// Gold label per schema aspect; absent aspects are Unmentioned.
inline std::vector<AspectLabel> gold_labels(const MasaRecord& r,
                                            const AspectSchema& schema) {
  std::vector<AspectLabel> out;
  for (const auto& a : schema.aspects) {
    out.push_back({a, r.label_of(a).value_or(SentimentLabel::Unmentioned)});
  }
  return out;
}

inline std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == '\n') {
      out.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

inline std::string repairs_string(const ParseOutcome& o) {
  std::string out;
  for (RepairKind k : o.repairs) {
    if (!out.empty()) out += ",";
    out += repair_name(k);
  }
  return out;
}

}  // namespace sde::testing
