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


// Prints one PASS/FAIL line per acceptance criterion; exits non-zero on any
// failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sys/wait.h>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "kappa_tables.hpp"
#include "oracles.hpp"
#include "sdekit/design.hpp"
#include "sdekit/harness.hpp"
#include "sdekit/metrics.hpp"
#include "sdekit/parse.hpp"
#include "sdekit/render.hpp"
#include "sdekit/schema.hpp"
#include "support.hpp"
#include "text_util.hpp"

using namespace sde;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::array<std::array<std::uint64_t, 4>, 4> random_counts(std::mt19937_64& rng) {
  std::array<std::array<std::uint64_t, 4>, 4> c{};
  const std::uint64_t max = 1 + rng() % 60;
  for (auto& row : c) {
    for (auto& v : row) v = rng() % (max + 1);
  }
  c[rng() % 4][rng() % 4] += 1;
  return c;
}

ConfusionMatrix to_confusion(const std::array<std::array<std::uint64_t, 4>, 4>& c) {
  ConfusionMatrix m;
  m.counts = c;
  return m;
}

double as_double(const oracle::Rational& r) { return r.convert_to<double>(); }

Verdict kappa_oracle() {
  Verdict v;
  std::mt19937_64 rng(1);
  const auto t0 = Clock::now();
  double worst = 0;
  int scored = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto c = random_counts(rng);
    const oracle::ExactKappa want = oracle::kappa(c);
    if (want.pe == 1) continue;
    const KappaResult got = weighted_kappa(to_confusion(c));
    worst = std::max(worst, std::abs(got.kappa - as_double(want.kappa)));
    ++scored;
  }
  const double secs = seconds_since(t0);
  v.require(scored == 1000, "degenerate random matrix");
  v.require(worst <= 1e-12, "max |delta| " + std::to_string(worst));
  v.require(secs < 1.0, "took " + std::to_string(secs) + " s");
  std::ostringstream os;
  os << "1000 matrices, max |delta| " << std::scientific << std::setprecision(2) << worst;
  if (v.ok) v.detail = os.str();
  return v;
}

Verdict kappa_anchors() {
  Verdict v;
  ConfusionMatrix diag;
  for (int i = 0; i < 4; ++i) diag.counts[i][i] = 7;
  v.require(weighted_kappa(diag).kappa == 1.0, "diagonal kappa != 1");
  ConfusionMatrix uniform;
  for (auto& row : uniform.counts) row.fill(3);
  const KappaResult u = weighted_kappa(uniform);
  v.require(u.po == 29.0 / 48.0, "uniform po != 29/48");
  v.require(u.pe == 29.0 / 48.0, "uniform pe != 29/48");
  v.require(u.kappa == 0.0, "uniform kappa != 0");
  if (v.ok) v.detail = "diagonal 1, uniform po = pe = 29/48, kappa 0";
  return v;
}

Verdict roundtrip() {
  Verdict v;
  const auto strategies = enumerate_design_space();
  const AspectSchema d1 = builtin_schema("d1");
  const AspectSchema d2 = builtin_schema("d2");
  const auto c1 = testing::d1_corpus(500, 7);
  const auto c2 = generate_fixture_corpus(d2, builtin_distribution("d2-train500"), 500, 7);
  std::mt19937_64 rng(2);
  const auto t0 = Clock::now();
  int failures = 0;
  for (int i = 0; i < 10000; ++i) {
    const DesignStrategy& s = strategies[rng() % strategies.size()];
    const bool first = rng() % 2 == 0;
    const AspectSchema& schema = first ? d1 : d2;
    const MasaRecord& r = first ? c1[rng() % c1.size()] : c2[rng() % c2.size()];
    const ParseOutcome o = parse_output(render_response(r, schema, s), s, schema);
    if (o.format_error || !o.repairs.empty() || o.labels != testing::gold_labels(r, schema)) {
      if (failures++ == 0) v.require(false, to_string(s) + " on " + r.id);
    }
  }
  const double secs = seconds_since(t0);
  v.require(secs < 10.0, "took " + std::to_string(secs) + " s");
  if (v.ok) v.detail = "10000 pairs over 216 strategies, 0 failures";
  return v;
}

Verdict repair_corpus() {
  Verdict v;
  const auto doc = nlohmann::json::parse(testing::read_fixture("repair_corpus.json"));
  std::set<std::string> kinds;
  std::size_t matched = 0;
  for (const auto& c : doc["cases"]) {
    const AspectSchema schema = builtin_schema(c["schema"].get<std::string>());
    const TaskKind kind = parse_task_kind(c["kind"].get<std::string>());
    const ParseOutcome o = parse_output(c["output"].get<std::string>(),
                                        parse_strategy(c["strategy"].get<std::string>()),
                                        schema, kind);
    std::vector<std::string> repairs;
    for (RepairKind k : o.repairs) repairs.emplace_back(repair_name(k));
    bool same = o.format_error == c["format_error"].get<bool>() &&
                repairs == c["repairs"].get<std::vector<std::string>>();
    for (const auto& k : c["repairs"]) kinds.insert(k.get<std::string>());
    if (kind == TaskKind::Masa) {
      for (const auto& al : o.labels) {
        same = same && label_name(al.label) ==
                           c["labels"].value(al.aspect, std::string("unmentioned"));
      }
    } else {
      std::vector<std::pair<std::string, std::string>> got;
      for (const auto& sp : o.spans) got.emplace_back(sp.type, sp.mention);
      same = same && got == c["spans"].get<std::vector<std::pair<std::string, std::string>>>();
    }
    if (same) ++matched;
    v.require(same, "case '" + c["name"].get<std::string>() + "'");
  }
  v.require(doc["cases"].size() >= 30, "fewer than 30 cases");
  v.require(kinds.size() == static_cast<std::size_t>(kRepairKindCount), "a repair kind is not covered");
  if (v.ok) {
    v.detail = std::to_string(matched) + "/" + std::to_string(doc["cases"].size()) +
               " cases, all " + std::to_string(kRepairKindCount) + " repair kinds";
  }
  return v;
}

Verdict grid_structure() {
  Verdict v;
  const DesignStrategy base = parse_strategy("inst_last/no_mi/natural/pu/txt/no_cot");
  const std::vector<std::pair<OptionGroup, std::vector<std::string>>> want = {
      {OptionGroup::Input, {"Inst-first", "No-inst", "MI"}},
      {OptionGroup::Output, {"Lines", "JSON", "NumLabel", "OU"}},
      {OptionGroup::Reasoning, {"CoT", "R-CoT"}},
  };
  for (const auto& [group, labels] : want) {
    const AblationGrid g = ablation_grid(base, group);
    v.require(g.baseline == base, std::string(group_name(group)) + " baseline");
    std::vector<std::string> got;
    for (const auto& var : g.variants) {
      got.push_back(var.label);
      v.require(axis_distance(var.strategy, base) == 1,
                std::string(group_name(group)) + "/" + var.label + " distance");
    }
    v.require(got == labels, std::string(group_name(group)) + " variant labels");
  }
  if (v.ok) v.detail = "Input 1+3, Output 1+4, Reasoning 1+2, all at distance 1";
  return v;
}

Verdict report_arithmetic() {
  Verdict v;
  std::vector<ScoreCell> cells(2);
  for (const auto& r : testing::kappa_rows()) {
    if (r.model != "c-llama2-chat" || r.train_size != 500 || r.group != "Input") continue;
    cells[0][r.option] = r.kappa["D1->D1"].get<double>();
    cells[1][r.option] = r.kappa["D2->D2"].get<double>();
  }
  const double delta = average_delta(cells, "Inst-first", "Inst-last, No-MI");
  v.require(std::abs(delta - 0.0121) <= 1e-9, "delta " + std::to_string(delta));

  const auto expected = nlohmann::json::parse(testing::read_fixture("masa_rankings_expected.json"));
  for (const auto& [group, e] : expected.items()) {
    std::vector<std::string> options;
    const RankingSummary r = average_rankings(options, testing::id_cells(group, &options));
    v.require(r.cells == e["cells"].get<std::size_t>(), group + " cell count");
    v.require(r.tied_cells == e["tied_cells"].get<std::size_t>(), group + " tied cells");
    for (const auto& [option, rank] : e["mean_rank"].items()) {
      v.require(std::abs(r.rank_of(option) - rank.get<double>()) <= 1e-12,
                group + "/" + option + " mean rank");
    }
  }
  std::ostringstream os;
  os << "ID-average delta " << std::showpos << std::fixed << std::setprecision(4) << delta
     << ", rankings of 3 groups match";
  if (v.ok) v.detail = os.str();
  return v;
}

std::vector<Span> random_spans(std::mt19937_64& rng) {
  static const std::vector<std::string> types = {"DNA", "protein"};
  static const std::vector<std::string> words = {"il-2", "IL-2", "gene", "nf-kb", "T", "cells"};
  std::vector<Span> out;
  const std::size_t n = rng() % 6;
  for (std::size_t i = 0; i < n; ++i) {
    std::string m = words[rng() % words.size()];
    for (std::size_t k = rng() % 3; k > 0; --k) m += " " + words[rng() % words.size()];
    out.push_back({types[rng() % types.size()], m, {}, {}});
  }
  return out;
}

std::vector<oracle::SimpleSpan> simple(const std::vector<Span>& spans) {
  std::vector<oracle::SimpleSpan> out;
  for (const auto& s : spans) out.push_back({s.type, s.mention});
  return out;
}

Verdict f1_properties() {
  Verdict v;
  std::mt19937_64 rng(7);
  for (int i = 0; i < 1000; ++i) {
    const auto g = random_spans(rng);
    const auto p = random_spans(rng);
    for (MatchMode mode : {MatchMode::Hard, MatchMode::Soft}) {
      v.require(match_spans(g, p, mode) ==
                    oracle::best_matching(simple(g), simple(p), mode == MatchMode::Soft),
                "matcher differs from brute force on instance " + std::to_string(i));
    }
    const std::vector<SpanRecord> gold = {{"r", "t", g}};
    const std::vector<IdSpans> pred = {{"r", p}};
    v.require(span_f1(gold, pred, MatchMode::Hard).f1 <= span_f1(gold, pred, MatchMode::Soft).f1,
              "hard F1 above soft on instance " + std::to_string(i));
  }
  if (v.ok) v.detail = "1000 instances: hard <= soft, matcher = brute force";
  return v;
}

Verdict perplexity_check() {
  Verdict v;
  for (double c : {0.0, 0.5, std::log(2.0), 1.0, 3.25}) {
    for (std::size_t n : {1u, 3u, 17u}) {
      v.require(perplexity(std::vector<double>(n, c)).ppl == std::exp(c),
                "uniform NLL " + std::to_string(c));
    }
  }
  const PerplexityResult cond = perplexity({std::log(2.0), std::log(8.0)}, 1);
  v.require(cond.token_count == 1, "conditional token count");
  v.require(std::abs(cond.ppl - 8.0) <= 1e-12, "conditional ppl " + std::to_string(cond.ppl));
  if (v.ok) v.detail = "uniform NLL gives e^c exactly, [ln2, ln8] after 1 gives 8";
  return v;
}

Verdict generator() {
  Verdict v;
  const AspectSchema d1 = builtin_schema("d1");
  const LabelDistribution dist = builtin_distribution("d1-train500");
  const auto a = generate_fixture_corpus(d1, dist, 10000, 7);
  double worst = 0;
  for (const auto& aspect : d1.aspects) {
    std::array<double, 4> freq{};
    for (const auto& r : a) freq[label_index(*r.label_of(aspect))] += 1.0 / 10000.0;
    for (std::size_t k = 0; k < 4; ++k) {
      worst = std::max(worst, std::abs(freq[k] - (*dist.find(aspect))[k]));
    }
  }
  v.require(worst <= 0.015, "max deviation " + std::to_string(worst));
  std::vector<TaskRecord> ta(a.begin(), a.end());
  const auto b = generate_fixture_corpus(d1, dist, 10000, 7);
  std::vector<TaskRecord> tb(b.begin(), b.end());
  v.require(corpus_to_jsonl(ta) == corpus_to_jsonl(tb), "regeneration differs");
  std::ostringstream os;
  os << "n=10000 seed 7, max deviation " << std::fixed << std::setprecision(4) << worst * 100
     << "%, byte-identical";
  if (v.ok) v.detail = os.str();
  return v;
}

int run(const std::string& cmd) {
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string quoted(const fs::path& p) { return "'" + p.string() + "'"; }

Verdict end_to_end() {
  Verdict v;
  const fs::path dir = fs::temp_directory_path() / "sdekit_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string cli = quoted(SDEKIT_CLI_PATH);
  const auto t0 = Clock::now();
  const std::vector<std::string> steps = {
      cli + " fixtures --schema d1 --dist d1-train500 -n 1000 --seed 7 -o " + quoted(dir / "gold.jsonl"),
      cli + " render --corpus " + quoted(dir / "gold.jsonl") + " --strategy ES-SDE -o " +
          quoted(dir / "samples.jsonl"),
      cli + " echo --samples " + quoted(dir / "samples.jsonl") + " -o " + quoted(dir / "preds.jsonl"),
      cli + " score --strategy ES-SDE --schema d1 --gold " + quoted(dir / "gold.jsonl") +
          " --predictions " + quoted(dir / "preds.jsonl") + " -o " + quoted(dir / "report.json"),
  };
  for (const auto& step : steps) {
    const int rc = run(step);
    v.require(rc == 0, "exit " + std::to_string(rc) + ": " + step);
  }
  const double secs = seconds_since(t0);
  if (v.ok) {
    const auto rep = nlohmann::json::parse(text::read_file(dir / "report.json"));
    v.require(rep["kappa"]["kappa"].get<double>() == 1.0, "kappa != 1");
    v.require(rep["error_rate"].get<double>() == 0.0, "error rate != 0");
    v.require(rep["n"].get<std::size_t>() == 1000, "n != 1000");
  }
  v.require(secs < 5.0, "took " + std::to_string(secs) + " s");
  if (v.ok) v.detail = "fixtures -> render -> echo -> score: kappa 1.0, error rate 0.0, exit 0";
  fs::remove_all(dir);
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"kappa oracle equivalence", kappa_oracle},
      {"kappa anchors", kappa_anchors},
      {"render/parse roundtrip", roundtrip},
      {"repair corpus", repair_corpus},
      {"grid structure", grid_structure},
      {"report arithmetic", report_arithmetic},
      {"span F1 properties", f1_properties},
      {"perplexity", perplexity_check},
      {"fixture generator", generator},
      {"end-to-end CLI", end_to_end},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.ok = false;
      v.detail = std::string("threw: ") + e.what();
    }
    const double ms = seconds_since(t0) * 1000.0;
    if (!v.ok) ++failed;
    std::cout << (v.ok ? "PASS" : "FAIL") << "  " << std::setw(2) << i + 1 << "  "
              << std::left << std::setw(26) << criteria[i].first << std::right << std::setw(9)
              << std::fixed << std::setprecision(1) << ms << " ms  " << v.detail << '\n';
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
            << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
