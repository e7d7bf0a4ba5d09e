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

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sdekit/parse.hpp"
#include "sdekit/schema.hpp"

namespace sde {

// Rows are gold labels, columns predictions, both in label_index() order.
struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, 4>, 4> counts{};

  void add(SentimentLabel gold, SentimentLabel predicted) {
    ++counts[label_index(gold)][label_index(predicted)];
  }
  std::uint64_t total() const;
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

struct WeightMatrix {
  std::array<std::array<double, 4>, 4> w{};
};

// Pos (1, 1/2, 0, 1/2); Neu (2/3, 1, 2/3, 2/3); Neg (0, 1/2, 1, 1/2);
// Unm (1/2, 2/3, 1/2, 1).
WeightMatrix default_weights();
std::vector<std::string> validate_weights(const WeightMatrix& w);

struct KappaResult {
  double po = 0;
  double pe = 0;
  double kappa = 0;
};

// Throws ValidationError on an empty matrix or when pe = 1.
KappaResult weighted_kappa(const ConfusionMatrix& conf,
                           const WeightMatrix& w = default_weights());

using IdOutcome = std::pair<std::string, ParseOutcome>;

struct ConfusionSet {
  ConfusionMatrix pooled;
  // Schema order.
  std::vector<std::pair<std::string, ConfusionMatrix>> per_aspect;
};

// Outcomes are matched to gold records by id; both sides must hold the same
// ids exactly once.
ConfusionSet build_confusion(const std::vector<MasaRecord>& gold,
                             const std::vector<IdOutcome>& outcomes,
                             const AspectSchema& schema);

// Throws ValidationError on an empty list.
double format_error_rate(const std::vector<ParseOutcome>& outcomes);
double format_error_rate(const std::vector<IdOutcome>& outcomes);

double slot_accuracy(const std::vector<MasaRecord>& gold,
                     const std::vector<IdOutcome>& outcomes,
                     const AspectSchema& schema);

enum class MatchMode { Hard, Soft };

std::string_view match_mode_name(MatchMode mode);

struct MatchScore {
  MatchMode mode = MatchMode::Hard;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
};

// ASCII case-fold, whitespace collapsed.
std::string normalize_mention(std::string_view mention);

// Same type and, after normalization, equal mentions (hard) or one mention
// containing the other (soft).
bool spans_match(const Span& gold, const Span& predicted, MatchMode mode);

// Size of a maximum one-to-one matching. Gold spans are taken in order and
// each tries augmenting paths, so earlier gold spans keep their partners
// unless a later span needs them rerouted.
std::size_t match_spans(const std::vector<Span>& gold,
                        const std::vector<Span>& predicted, MatchMode mode);

using IdSpans = std::pair<std::string, std::vector<Span>>;

// Micro-averaged over the corpus.
MatchScore span_f1(const std::vector<SpanRecord>& gold,
                   const std::vector<IdSpans>& predicted, MatchMode mode);

struct PerplexityResult {
  std::size_t token_count = 0;
  double mean_nll = 0;
  double ppl = 0;
};

// Tokens from `context_boundary` on are scored; the ones before are context.
PerplexityResult perplexity(const std::vector<double>& nlls,
                            std::optional<std::size_t> context_boundary = std::nullopt);

struct NllRecord {
  std::string id;
  std::vector<double> nlls;
  std::optional<std::size_t> context_boundary;
};

// {"id", "nlls", "context_boundary"} JSON lines.
std::vector<NllRecord> parse_nll_jsonl(std::string_view jsonl);

}  // namespace sde
