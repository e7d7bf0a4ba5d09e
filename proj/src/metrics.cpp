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


#include "sdekit/metrics.hpp"

#include <cmath>
#include <unordered_map>

#include "json.hpp"
#include "sdekit/errors.hpp"
#include "text_util.hpp"

namespace sde {

namespace {

// Index of each prediction by id, after checking that the id sets agree.
template <typename Gold, typename Pred>
std::vector<std::size_t> align(const std::vector<Gold>& gold,
                               const std::vector<Pred>& pred) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (!index.emplace(pred[i].first, i).second) {
      throw ValidationError("duplicate prediction id '" + pred[i].first + "'");
    }
  }
  std::vector<std::size_t> out;
  std::vector<std::string> missing;
  for (const Gold& g : gold) {
    auto it = index.find(g.id);
    if (it == index.end()) {
      missing.push_back(g.id);
    } else {
      out.push_back(it->second);
    }
  }
  if (!missing.empty()) {
    throw ValidationError("no prediction for gold id(s): " + text::join(missing, ", "));
  }
  if (pred.size() != gold.size()) {
    std::unordered_map<std::string, bool> gold_ids;
    for (const Gold& g : gold) gold_ids.emplace(g.id, true);
    std::vector<std::string> extra;
    for (const Pred& p : pred) {
      if (!gold_ids.count(p.first)) extra.push_back(p.first);
    }
    throw ValidationError("prediction id(s) not in gold: " + text::join(extra, ", "));
  }
  return out;
}

}  // namespace

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t n = 0;
  for (const auto& row : counts) {
    for (std::uint64_t c : row) n += c;
  }
  return n;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) counts[i][j] += other.counts[i][j];
  }
  return *this;
}

WeightMatrix default_weights() {
  WeightMatrix m;
  m.w = {{
      {1.0, 1.0 / 2, 0.0, 1.0 / 2},
      {2.0 / 3, 1.0, 2.0 / 3, 2.0 / 3},
      {0.0, 1.0 / 2, 1.0, 1.0 / 2},
      {1.0 / 2, 2.0 / 3, 1.0 / 2, 1.0},
  }};
  return m;
}

std::vector<std::string> validate_weights(const WeightMatrix& m) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      const double v = m.w[i][j];
      if (!(v >= 0.0 && v <= 1.0)) {
        out.push_back("weight [" + std::to_string(i) + "][" + std::to_string(j) +
                      "] outside [0, 1]");
      }
    }
    if (m.w[i][i] != 1.0) out.push_back("diagonal weight [" + std::to_string(i) + "] is not 1");
  }
  return out;
}

KappaResult weighted_kappa(const ConfusionMatrix& conf, const WeightMatrix& m) {
  if (auto problems = validate_weights(m); !problems.empty()) {
    throw ValidationError("invalid weights: " + text::join(problems, "; "));
  }
  const std::uint64_t total = conf.total();
  if (total == 0) throw ValidationError("empty confusion matrix");
  std::array<double, 4> rows{};
  std::array<double, 4> cols{};
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      rows[i] += static_cast<double>(conf.counts[i][j]);
      cols[j] += static_cast<double>(conf.counts[i][j]);
    }
  }
  // Weighted sums of counts first, one division at the end, so that a
  // diagonal matrix gives po = 1 and independent marginals give po = pe
  // without rounding noise.
  const double n = static_cast<double>(total);
  double observed = 0;
  double chance = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      observed += m.w[i][j] * static_cast<double>(conf.counts[i][j]);
      chance += m.w[i][j] * rows[i] * cols[j];
    }
  }
  KappaResult r;
  r.po = observed / n;
  r.pe = chance / (n * n);
  if (r.pe >= 1.0) {
    throw ValidationError("degenerate marginals: chance agreement is 1");
  }
  r.kappa = (r.po - r.pe) / (1.0 - r.pe);
  return r;
}

ConfusionSet build_confusion(const std::vector<MasaRecord>& gold,
                             const std::vector<IdOutcome>& outcomes,
                             const AspectSchema& schema) {
  const std::vector<std::size_t> index = align(gold, outcomes);
  ConfusionSet out;
  for (const auto& a : schema.aspects) out.per_aspect.emplace_back(a, ConfusionMatrix{});
  for (std::size_t r = 0; r < gold.size(); ++r) {
    const ParseOutcome& o = outcomes[index[r]].second;
    for (std::size_t k = 0; k < schema.aspects.size(); ++k) {
      const std::string& a = schema.aspects[k];
      const SentimentLabel g = gold[r].label_of(a).value_or(SentimentLabel::Unmentioned);
      const SentimentLabel p = o.label_of(a).value_or(SentimentLabel::Unmentioned);
      out.per_aspect[k].second.add(g, p);
      out.pooled.add(g, p);
    }
  }
  return out;
}

double format_error_rate(const std::vector<ParseOutcome>& outcomes) {
  if (outcomes.empty()) throw ValidationError("format error rate of no outcomes");
  std::size_t errors = 0;
  for (const ParseOutcome& o : outcomes) errors += o.format_error ? 1 : 0;
  return static_cast<double>(errors) / static_cast<double>(outcomes.size());
}

double format_error_rate(const std::vector<IdOutcome>& outcomes) {
  std::vector<ParseOutcome> plain;
  plain.reserve(outcomes.size());
  for (const auto& [id, o] : outcomes) plain.push_back(o);
  return format_error_rate(plain);
}

double slot_accuracy(const std::vector<MasaRecord>& gold,
                     const std::vector<IdOutcome>& outcomes,
                     const AspectSchema& schema) {
  const ConfusionSet c = build_confusion(gold, outcomes, schema);
  const std::uint64_t total = c.pooled.total();
  if (total == 0) throw ValidationError("slot accuracy of no slots");
  std::uint64_t hits = 0;
  for (std::size_t i = 0; i < 4; ++i) hits += c.pooled.counts[i][i];
  return static_cast<double>(hits) / static_cast<double>(total);
}

std::string_view match_mode_name(MatchMode mode) {
  return mode == MatchMode::Hard ? "hard" : "soft";
}

std::string normalize_mention(std::string_view mention) {
  return text::lower(text::collapse_whitespace(mention));
}

bool spans_match(const Span& gold, const Span& predicted, MatchMode mode) {
  if (gold.type != predicted.type) return false;
  const std::string g = normalize_mention(gold.mention);
  const std::string p = normalize_mention(predicted.mention);
  if (mode == MatchMode::Hard) return g == p;
  return g.find(p) != std::string::npos || p.find(g) != std::string::npos;
}

namespace {

bool augment(std::size_t g, const std::vector<std::vector<std::size_t>>& edges,
             std::vector<bool>& seen, std::vector<std::ptrdiff_t>& owner) {
  for (std::size_t p : edges[g]) {
    if (seen[p]) continue;
    seen[p] = true;
    if (owner[p] < 0 || augment(static_cast<std::size_t>(owner[p]), edges, seen, owner)) {
      owner[p] = static_cast<std::ptrdiff_t>(g);
      return true;
    }
  }
  return false;
}

}  // namespace

std::size_t match_spans(const std::vector<Span>& gold, const std::vector<Span>& predicted,
                        MatchMode mode) {
  std::vector<std::vector<std::size_t>> edges(gold.size());
  for (std::size_t g = 0; g < gold.size(); ++g) {
    for (std::size_t p = 0; p < predicted.size(); ++p) {
      if (spans_match(gold[g], predicted[p], mode)) edges[g].push_back(p);
    }
  }
  std::vector<std::ptrdiff_t> owner(predicted.size(), -1);
  std::size_t matched = 0;
  for (std::size_t g = 0; g < gold.size(); ++g) {
    std::vector<bool> seen(predicted.size(), false);
    if (augment(g, edges, seen, owner)) ++matched;
  }
  return matched;
}

MatchScore span_f1(const std::vector<SpanRecord>& gold, const std::vector<IdSpans>& predicted,
                   MatchMode mode) {
  const std::vector<std::size_t> index = align(gold, predicted);
  MatchScore s;
  s.mode = mode;
  for (std::size_t r = 0; r < gold.size(); ++r) {
    const auto& pred = predicted[index[r]].second;
    const std::size_t tp = match_spans(gold[r].spans, pred, mode);
    s.tp += tp;
    s.fp += pred.size() - tp;
    s.fn += gold[r].spans.size() - tp;
  }
  const double tp = static_cast<double>(s.tp);
  s.precision = s.tp + s.fp == 0 ? 0.0 : tp / static_cast<double>(s.tp + s.fp);
  s.recall = s.tp + s.fn == 0 ? 0.0 : tp / static_cast<double>(s.tp + s.fn);
  s.f1 = s.precision + s.recall == 0.0
             ? 0.0
             : 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

PerplexityResult perplexity(const std::vector<double>& nlls,
                            std::optional<std::size_t> context_boundary) {
  const std::size_t from = context_boundary.value_or(0);
  if (from >= nlls.size()) {
    throw ValidationError("no tokens to score: " + std::to_string(nlls.size()) +
                          " token(s), context boundary " + std::to_string(from));
  }
  PerplexityResult r;
  // Running mean: identical values give back exactly that value.
  for (std::size_t i = from; i < nlls.size(); ++i) {
    const double x = nlls[i];
    if (!(x >= 0.0) || std::isinf(x)) {
      throw ValidationError("token " + std::to_string(i) +
                            ": negative log-likelihood must be finite and non-negative");
    }
    ++r.token_count;
    r.mean_nll += (x - r.mean_nll) / static_cast<double>(r.token_count);
  }
  r.ppl = std::exp(r.mean_nll);
  return r;
}

std::vector<NllRecord> parse_nll_jsonl(std::string_view jsonl) {
  std::vector<NllRecord> out;
  std::size_t line_no = 0;
  for (std::string_view line : text::split_lines(jsonl)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const std::string where = "log-likelihood line " + std::to_string(line_no);
    const auto obj = nlohmann::json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) throw ValidationError(where + ": malformed JSON");
    NllRecord r;
    try {
      r.id = obj.at("id").get<std::string>();
      r.nlls = obj.at("nlls").get<std::vector<double>>();
      if (auto it = obj.find("context_boundary"); it != obj.end() && !it->is_null()) {
        r.context_boundary = it->get<std::size_t>();
      }
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(where + ": " + e.what());
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace sde
