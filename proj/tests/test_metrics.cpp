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


#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"
#include "sdekit/errors.hpp"
#include "sdekit/metrics.hpp"
#include "support.hpp"

using namespace sde;

namespace {

using Counts = std::array<std::array<std::uint64_t, 4>, 4>;

ConfusionMatrix matrix(const Counts& c) {
  ConfusionMatrix m;
  m.counts = c;
  return m;
}

oracle::Rational fraction(const std::string& s) { return oracle::Rational(s); }

Counts random_counts(std::mt19937_64& rng, std::uint64_t max) {
  std::uniform_int_distribution<std::uint64_t> d(0, max);
  Counts c{};
  for (auto& row : c) {
    for (auto& v : row) v = d(rng);
  }
  c[0][0] += 1;
  return c;
}

}  // namespace

TEST_CASE("default weights hold the table values") {
  const WeightMatrix w = default_weights();
  const auto exact = oracle::table_weights();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      CHECK(w.w[i][j] == doctest::Approx(exact[i][j].convert_to<double>()).epsilon(1e-15));
    }
    CHECK(w.w[i][i] == 1.0);
  }
  CHECK(validate_weights(w).empty());
  WeightMatrix bad = w;
  bad.w[1][1] = 0.9;
  bad.w[0][2] = -0.1;
  CHECK(validate_weights(bad).size() == 2);
}

TEST_CASE("kappa anchors") {
  SUBCASE("diagonal gives exactly one") {
    const KappaResult k = weighted_kappa(matrix({{{10, 0, 0, 0}, {0, 10, 0, 0}, {0, 0, 10, 0},
                                                  {0, 0, 0, 10}}}));
    CHECK(k.po == 1.0);
    CHECK(k.kappa == 1.0);
  }
  const auto fx = nlohmann::json::parse(testing::read_fixture("kappa_anchors.json"));
  for (const auto& c : fx["cases"]) {
    const Counts counts = c["counts"].get<Counts>();
    const KappaResult k = weighted_kappa(matrix(counts));
    const oracle::ExactKappa exact = oracle::kappa(counts);
    INFO(c["name"].get<std::string>());
    CHECK(exact.po == fraction(c["po"]));
    CHECK(exact.pe == fraction(c["pe"]));
    CHECK(exact.kappa == fraction(c["kappa"]));
    CHECK(std::abs(k.po - exact.po.convert_to<double>()) <= 1e-15);
    CHECK(std::abs(k.pe - exact.pe.convert_to<double>()) <= 1e-15);
    CHECK(std::abs(k.kappa - exact.kappa.convert_to<double>()) <= 1e-12);
  }
  SUBCASE("uniform is exactly zero") {
    Counts u;
    for (auto& row : u) row.fill(1);
    const KappaResult k = weighted_kappa(matrix(u));
    CHECK(k.po == k.pe);
    CHECK(k.po == 29.0 / 48.0);
    CHECK(k.kappa == 0.0);
  }
}

TEST_CASE("kappa errors") {
  CHECK_THROWS_AS(weighted_kappa(ConfusionMatrix{}), ValidationError);
  Counts single{};
  single[2][2] = 7;
  CHECK_THROWS_WITH_AS(weighted_kappa(matrix(single)), doctest::Contains("degenerate marginals"),
                       ValidationError);
}

TEST_CASE("kappa equals the exact oracle on random matrices") {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 1000; ++t) {
    const Counts c = random_counts(rng, t % 2 ? 50 : 5);
    const oracle::ExactKappa exact = oracle::kappa(c);
    if (exact.pe == 1) continue;
    const KappaResult k = weighted_kappa(matrix(c));
    REQUIRE(std::abs(k.kappa - exact.kappa.convert_to<double>()) <= 1e-12);
  }
}

TEST_CASE("kappa never exceeds one and is one only on the diagonal") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 500; ++t) {
    Counts c = random_counts(rng, 9);
    const KappaResult k = weighted_kappa(matrix(c));
    CHECK(k.kappa <= 1.0);
    bool off = false;
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) off = off || (i != j && c[i][j] > 0);
    }
    if (off) CHECK(k.kappa < 1.0);
  }
}

TEST_CASE("independent marginals give kappa zero under any weights") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<std::uint64_t> d(1, 6);
  std::uniform_real_distribution<double> wd(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    std::array<std::uint64_t, 4> a{}, b{};
    for (auto& v : a) v = d(rng);
    for (auto& v : b) v = d(rng);
    Counts c{};
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) c[i][j] = a[i] * b[j];
    }
    WeightMatrix w;
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) w.w[i][j] = i == j ? 1.0 : wd(rng);
    }
    CHECK(std::abs(weighted_kappa(matrix(c), w).kappa) <= 1e-12);
  }
}

TEST_CASE("kappa is invariant under a shared relabeling") {
  std::mt19937_64 rng(99);
  std::array<int, 4> perm = {0, 1, 2, 3};
  const WeightMatrix w = default_weights();
  for (int t = 0; t < 200; ++t) {
    std::shuffle(perm.begin(), perm.end(), rng);
    const Counts c = random_counts(rng, 20);
    Counts pc{};
    WeightMatrix pw;
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        pc[perm[i]][perm[j]] = c[i][j];
        pw.w[perm[i]][perm[j]] = w.w[i][j];
      }
    }
    CHECK(weighted_kappa(matrix(c), w).kappa ==
          doctest::Approx(weighted_kappa(matrix(pc), pw).kappa).epsilon(1e-12));
  }
}

namespace {

ParseOutcome outcome(std::vector<AspectLabel> labels, bool error = false) {
  ParseOutcome o;
  o.labels = std::move(labels);
  o.format_error = error;
  return o;
}

AspectSchema two_aspects() {
  AspectSchema s;
  s.task_id = "two";
  s.aspects = {"food", "price"};
  return s;
}

MasaRecord gold(std::string id, SentimentLabel food, SentimentLabel price) {
  MasaRecord r;
  r.id = std::move(id);
  r.text = "t";
  r.labels = {{"food", food}, {"price", price}};
  return r;
}

}  // namespace

TEST_CASE("confusion counts every slot once") {
  using L = SentimentLabel;
  const AspectSchema schema = two_aspects();
  const std::vector<MasaRecord> g = {gold("a", L::Positive, L::Unmentioned),
                                     gold("b", L::Positive, L::Negative)};
  const std::vector<IdOutcome> o = {
      {"b", outcome({{"food", L::Negative}, {"price", L::Negative}})},
      {"a", outcome({{"food", L::Positive}, {"price", L::Unmentioned}})}};
  const ConfusionSet c = build_confusion(g, o, schema);
  CHECK(c.pooled.total() == 4);
  CHECK(c.pooled.counts[0][0] == 1);
  CHECK(c.pooled.counts[0][2] == 1);
  CHECK(c.pooled.counts[2][2] == 1);
  CHECK(c.pooled.counts[3][3] == 1);
  REQUIRE(c.per_aspect.size() == 2);
  CHECK(c.per_aspect[0].first == "food");
  CHECK(c.per_aspect[0].second.counts[0][2] == 1);
  CHECK(c.per_aspect[1].second.total() == 2);
  CHECK(slot_accuracy(g, o, schema) == 0.75);

  SUBCASE("misaligned ids") {
    std::vector<IdOutcome> wrong = o;
    wrong[0].first = "zzz";
    CHECK_THROWS_WITH_AS(build_confusion(g, wrong, schema), doctest::Contains("b"),
                         ValidationError);
    wrong.pop_back();
    CHECK_THROWS_AS(slot_accuracy(g, wrong, schema), ValidationError);
  }
}

TEST_CASE("slot accuracy extremes") {
  using L = SentimentLabel;
  const AspectSchema schema = two_aspects();
  const std::vector<MasaRecord> g = {gold("a", L::Positive, L::Neutral)};
  CHECK(slot_accuracy(g, {{"a", outcome({{"food", L::Positive}, {"price", L::Neutral}})}},
                      schema) == 1.0);
  CHECK(slot_accuracy(g, {{"a", outcome({{"food", L::Neutral}, {"price", L::Positive}})}},
                      schema) == 0.0);
}

TEST_CASE("format error rate") {
  std::vector<ParseOutcome> o(4);
  CHECK(format_error_rate(o) == 0.0);
  o[1].format_error = true;
  CHECK(format_error_rate(o) == 0.25);
  for (auto& x : o) x.format_error = true;
  CHECK(format_error_rate(o) == 1.0);
  CHECK_THROWS_AS(format_error_rate(std::vector<ParseOutcome>{}), ValidationError);

  std::mt19937_64 rng(3);
  std::vector<ParseOutcome> grow;
  double last = 0;
  for (int i = 0; i < 50; ++i) {
    ParseOutcome p;
    p.format_error = rng() % 3 == 0;
    grow.push_back(p);
    const double now = format_error_rate(grow);
    if (p.format_error) CHECK(now >= last);
    last = now;
  }
}

namespace {

std::vector<Span> spans(const std::vector<std::pair<std::string, std::string>>& v) {
  std::vector<Span> out;
  for (const auto& [t, m] : v) out.push_back({t, m, {}, {}});
  return out;
}

SpanRecord span_record(std::string id, std::vector<Span> s) {
  SpanRecord r;
  r.id = std::move(id);
  r.text = "x";
  r.spans = std::move(s);
  return r;
}

std::vector<oracle::SimpleSpan> simple(const std::vector<Span>& v) {
  std::vector<oracle::SimpleSpan> out;
  for (const Span& s : v) out.push_back({s.type, s.mention});
  return out;
}

}  // namespace

TEST_CASE("span matching examples") {
  const auto g = spans({{"protein", "IL-2"}});
  CHECK(span_f1({span_record("a", g)}, {{"a", g}}, MatchMode::Hard).f1 == 1.0);
  const auto p = spans({{"protein", "IL-2 gene"}});
  CHECK(span_f1({span_record("a", g)}, {{"a", p}}, MatchMode::Hard).tp == 0);
  CHECK(span_f1({span_record("a", g)}, {{"a", p}}, MatchMode::Soft).tp == 1);
  CHECK(span_f1({span_record("a", g)}, {{"a", spans({{"DNA", "IL-2"}})}}, MatchMode::Soft).tp ==
        0);
  CHECK(normalize_mention("  NF-kappa \t B ") == "nf-kappa b");
  CHECK(span_f1({span_record("a", {})}, {{"a", {}}}, MatchMode::Hard).f1 == 0.0);
  CHECK_THROWS_AS(span_f1({span_record("a", g)}, {{"b", g}}, MatchMode::Hard), ValidationError);
}

TEST_CASE("gold-order matching reroutes earlier picks when needed") {
  // In soft mode "a b" could take either prediction; a plain first-fit pass
  // would give it "a b c" and leave "c" unmatched.
  const auto g = spans({{"T", "a b"}, {"T", "c"}});
  const auto p = spans({{"T", "a b c"}, {"T", "a"}});
  CHECK(match_spans(g, p, MatchMode::Soft) == 2);
  CHECK(oracle::best_matching(simple(g), simple(p), true) == 2);
}

TEST_CASE("mixed corpus matches the exhaustive oracle fixture") {
  const auto fx = nlohmann::json::parse(testing::read_fixture("span_f1_oracle.json"));
  std::vector<SpanRecord> gold;
  std::vector<IdSpans> pred;
  for (const auto& r : fx["records"]) {
    std::vector<Span> g, p;
    for (const auto& s : r["gold"]) g.push_back({s[0], s[1], {}, {}});
    for (const auto& s : r["pred"]) p.push_back({s[0], s[1], {}, {}});
    gold.push_back(span_record(r["id"], g));
    pred.emplace_back(r["id"], p);
  }
  for (const auto& e : fx["expected"]) {
    const MatchMode mode = e["mode"] == "hard" ? MatchMode::Hard : MatchMode::Soft;
    const MatchScore s = span_f1(gold, pred, mode);
    INFO(e["mode"].get<std::string>());
    CHECK(s.tp == e["tp"].get<std::uint64_t>());
    CHECK(s.fp == e["fp"].get<std::uint64_t>());
    CHECK(s.fn == e["fn"].get<std::uint64_t>());
    CHECK(s.precision == doctest::Approx(e["precision"].get<double>()).epsilon(1e-12));
    CHECK(s.recall == doctest::Approx(e["recall"].get<double>()).epsilon(1e-12));
    CHECK(s.f1 == doctest::Approx(e["f1"].get<double>()).epsilon(1e-12));
  }
}

namespace {

std::vector<Span> random_spans(std::mt19937_64& rng, std::size_t max) {
  static const std::vector<std::string> types = {"A", "B"};
  static const std::vector<std::string> words = {"x", "y", "z", "X"};
  std::vector<Span> out;
  const std::size_t n = rng() % (max + 1);
  for (std::size_t i = 0; i < n; ++i) {
    std::string m = words[rng() % words.size()];
    const std::size_t extra = rng() % 3;
    for (std::size_t k = 0; k < extra; ++k) m += (rng() % 4 ? " " : "  ") + words[rng() % words.size()];
    out.push_back({types[rng() % types.size()], m, {}, {}});
  }
  return out;
}

}  // namespace

TEST_CASE("matcher equals brute force and hard never beats soft") {
  std::mt19937_64 rng(123);
  for (int t = 0; t < 1000; ++t) {
    const auto g = random_spans(rng, 5);
    const auto p = random_spans(rng, 5);
    for (MatchMode mode : {MatchMode::Hard, MatchMode::Soft}) {
      REQUIRE(match_spans(g, p, mode) ==
              oracle::best_matching(simple(g), simple(p), mode == MatchMode::Soft));
    }
    const std::vector<SpanRecord> gold = {span_record("r", g)};
    const std::vector<IdSpans> pred = {{"r", p}};
    CHECK(span_f1(gold, pred, MatchMode::Hard).f1 <= span_f1(gold, pred, MatchMode::Soft).f1);
  }
}

TEST_CASE("perplexity") {
  const double ln2 = std::log(2.0);
  CHECK(perplexity({ln2, ln2}).ppl == std::exp(ln2));
  CHECK(perplexity({ln2, ln2}).ppl == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(perplexity({0, 0, 0}).ppl == 1.0);
  const PerplexityResult cond = perplexity({ln2, std::log(8.0)}, 1);
  CHECK(cond.token_count == 1);
  CHECK(cond.ppl == doctest::Approx(8.0).epsilon(1e-15));
  for (double c : {0.1, 0.7, 1.3, 2.9}) {
    CHECK(perplexity(std::vector<double>(7, c)).ppl == std::exp(c));
  }
  CHECK(perplexity({1.0, 3.0}).mean_nll == 2.0);
  CHECK_THROWS_AS(perplexity({}), ValidationError);
  CHECK_THROWS_AS(perplexity({1.0}, 1), ValidationError);
  CHECK_THROWS_AS(perplexity({1.0, -0.5}), ValidationError);
  CHECK(perplexity({0.5, 0.0, 2.0}).ppl >= 1.0);
}

TEST_CASE("log-likelihood lines") {
  const auto recs = parse_nll_jsonl(
      "{\"id\":\"a\",\"nlls\":[0.5,1.5],\"context_boundary\":1}\n\n{\"id\":\"b\",\"nlls\":[1]}\n");
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].context_boundary == std::optional<std::size_t>(1));
  CHECK_FALSE(recs[1].context_boundary);
  CHECK_THROWS_WITH_AS(parse_nll_jsonl("{\"id\":\"a\"}\n"), doctest::Contains("line 1"),
                       ValidationError);
}
