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


#include "sdekit/harness.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "sdekit/errors.hpp"
#include "text_util.hpp"

namespace sde {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json parse_object(std::string_view text, std::string_view what) {
  ordered_json j = ordered_json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw ValidationError(std::string(what) + ": not a JSON object");
  }
  return j;
}

template <typename T>
T field(const ordered_json& j, const char* key, std::string_view what) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError(std::string(what) + ": missing or mistyped field \"" + key + "\"");
  }
}

template <typename T>
T field_or(const ordered_json& j, const char* key, T fallback, std::string_view what) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return field<T>(j, key, what);
}

ordered_json kappa_json(const KappaResult& k) {
  return {{"po", k.po}, {"pe", k.pe}, {"kappa", k.kappa}};
}

KappaResult kappa_from(const ordered_json& j) {
  return {j.at("po").get<double>(), j.at("pe").get<double>(), j.at("kappa").get<double>()};
}

ordered_json match_json(const MatchScore& s) {
  return {{"mode", match_mode_name(s.mode)}, {"precision", s.precision},
          {"recall", s.recall},              {"f1", s.f1},
          {"tp", s.tp},                      {"fp", s.fp},
          {"fn", s.fn}};
}

MatchScore match_from(const ordered_json& j) {
  MatchScore s;
  s.mode = j.at("mode").get<std::string>() == "hard" ? MatchMode::Hard : MatchMode::Soft;
  s.precision = j.at("precision").get<double>();
  s.recall = j.at("recall").get<double>();
  s.f1 = j.at("f1").get<double>();
  s.tp = j.at("tp").get<std::uint64_t>();
  s.fp = j.at("fp").get<std::uint64_t>();
  s.fn = j.at("fn").get<std::uint64_t>();
  return s;
}

void write_lines(const std::filesystem::path& path, const std::vector<std::string>& lines) {
  std::string body;
  for (const std::string& l : lines) {
    body += l;
    body += '\n';
  }
  text::write_file(path, body);
}

}  // namespace

std::string RunManifest::default_trainer_metadata() {
  ordered_json j = {{"lr", 1e-4},
                    {"batch_size", 4},
                    {"lora_rank", 8},
                    {"lora_alpha", 32},
                    {"lora_dropout", 0.1}};
  return j.dump();
}

std::string manifest_to_json(const RunManifest& m) {
  ordered_json j;
  j["run_id"] = m.run_id;
  j["task_id"] = m.task_id;
  if (m.schema_path) j["schema_path"] = *m.schema_path;
  j["task_kind"] = task_kind_name(m.task_kind);
  j["strategy"] = to_string(m.strategy);
  j["train_size"] = m.train_size;
  j["instruction_variant"] = m.instruction_variant;
  j["icl_examples"] = m.icl_examples;
  j["decode_seed"] = m.decode_seed ? ordered_json(*m.decode_seed) : ordered_json(nullptr);
  j["group"] = m.group;
  j["option_label"] = m.option_label;
  j["baseline_label"] = m.baseline_label;
  j["cell"] = m.cell;
  j["trainer_metadata"] = ordered_json::parse(m.trainer_metadata);
  return j.dump(2);
}

RunManifest manifest_from_json(std::string_view json_text) {
  const ordered_json j = parse_object(json_text, "manifest");
  const std::string_view what = "manifest";
  RunManifest m;
  m.run_id = field<std::string>(j, "run_id", what);
  if (m.run_id.empty()) throw ValidationError("manifest: empty run_id");
  m.task_id = field<std::string>(j, "task_id", what);
  if (j.contains("schema_path") && !j["schema_path"].is_null()) {
    m.schema_path = field<std::string>(j, "schema_path", what);
  }
  m.task_kind = parse_task_kind(field_or<std::string>(j, "task_kind", "masa", what));
  m.strategy = parse_strategy(field<std::string>(j, "strategy", what));
  m.train_size = field<std::size_t>(j, "train_size", what);
  m.instruction_variant = field_or<std::size_t>(j, "instruction_variant", 0, what);
  m.icl_examples = field_or<std::size_t>(j, "icl_examples", 0, what);
  if (j.contains("decode_seed") && !j["decode_seed"].is_null()) {
    m.decode_seed = field<std::uint64_t>(j, "decode_seed", what);
  }
  m.group = field_or<std::string>(j, "group", "", what);
  m.option_label = field_or<std::string>(j, "option_label", "", what);
  m.baseline_label = field_or<std::string>(j, "baseline_label", "", what);
  m.cell = field_or<std::string>(j, "cell", "", what);
  if (j.contains("trainer_metadata")) {
    if (!j["trainer_metadata"].is_object()) {
      throw ValidationError("manifest: trainer_metadata must be an object");
    }
    m.trainer_metadata = j["trainer_metadata"].dump();
  }
  return m;
}

RunManifest load_manifest(const std::filesystem::path& path) {
  try {
    return manifest_from_json(text::read_file(path));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

AspectSchema manifest_schema(const RunManifest& m) {
  return m.schema_path ? load_schema(*m.schema_path) : builtin_schema(m.task_id);
}

std::vector<RunManifest> grid_manifests(const RunManifest& base, OptionGroup group,
                                        std::string_view run_id_prefix) {
  const AblationGrid grid = ablation_grid(base.strategy, group);
  std::vector<RunManifest> out;
  auto add = [&](const std::string& label, const DesignStrategy& s) {
    RunManifest m = base;
    m.run_id = std::string(run_id_prefix) + "-" + std::to_string(out.size());
    m.strategy = s;
    m.group = std::string(group_name(group));
    m.option_label = label;
    m.baseline_label = grid.baseline_label;
    out.push_back(std::move(m));
  };
  add(grid.baseline_label, grid.baseline);
  for (const GridVariant& v : grid.variants) add(v.label, v.strategy);
  return out;
}

EmitPaths emit_run(const RunManifest& manifest, const std::vector<TaskRecord>& corpus,
                   const std::vector<TaskRecord>& test, const PromptTemplate& tmpl,
                   const std::filesystem::path& out_dir) {
  if (corpus.size() < manifest.train_size) {
    throw ValidationError("run " + manifest.run_id + ": train_size " +
                          std::to_string(manifest.train_size) + " exceeds corpus size " +
                          std::to_string(corpus.size()));
  }
  if (manifest.icl_examples > manifest.train_size) {
    throw ValidationError("run " + manifest.run_id + ": icl_examples exceeds train_size");
  }
  const AspectSchema schema = manifest_schema(manifest);
  const std::vector<TaskRecord> train(corpus.begin(),
                                      corpus.begin() + static_cast<std::ptrdiff_t>(manifest.train_size));
  const std::vector<TaskRecord> exemplars(
      train.begin(), train.begin() + static_cast<std::ptrdiff_t>(manifest.icl_examples));

  std::vector<std::string> sample_lines;
  for (const TrainingSample& s :
       render_corpus(train, schema, manifest.strategy, tmpl, manifest.instruction_variant)) {
    sample_lines.push_back(sample_to_json(s));
  }
  std::vector<std::string> eval_lines;
  for (const TaskRecord& r : test) {
    ordered_json j;
    j["id"] = record_id(r);
    j["prompt"] = render_eval_prompt(r, schema, manifest.strategy, tmpl, exemplars,
                                     manifest.instruction_variant);
    eval_lines.push_back(j.dump());
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  EmitPaths paths;
  paths.samples = out_dir / (manifest.run_id + ".samples.jsonl");
  paths.eval_prompts = out_dir / (manifest.run_id + ".eval.jsonl");
  paths.test_gold = out_dir / (manifest.run_id + ".test.jsonl");
  paths.manifest = out_dir / (manifest.run_id + ".manifest.json");
  write_lines(paths.samples, sample_lines);
  write_lines(paths.eval_prompts, eval_lines);
  text::write_file(paths.test_gold, corpus_to_jsonl(test));
  text::write_file(paths.manifest, manifest_to_json(manifest) + "\n");
  return paths;
}

double EvalReport::headline() const {
  if (task_kind == TaskKind::Masa) {
    if (!kappa) throw ValidationError("report " + run_id + " has no kappa");
    return kappa->kappa;
  }
  if (!f1_soft) throw ValidationError("report " + run_id + " has no soft F1");
  return f1_soft->f1;
}

EvalReport score_run(const RunManifest& manifest, const std::vector<TaskRecord>& gold,
                     const std::vector<RawOutput>& predictions) {
  return score_run(manifest, manifest_schema(manifest), gold, predictions);
}

EvalReport score_run(const RunManifest& manifest, const AspectSchema& schema,
                     const std::vector<TaskRecord>& gold,
                     const std::vector<RawOutput>& predictions) {
  if (gold.empty()) throw ValidationError("run " + manifest.run_id + ": empty gold set");
  for (const TaskRecord& r : gold) {
    if (record_kind(r) != manifest.task_kind) {
      throw ValidationError("run " + manifest.run_id + ": gold record " + record_id(r) +
                            " is not a " + std::string(task_kind_name(manifest.task_kind)) +
                            " record");
    }
  }
  const auto outcomes = batch_parse(predictions, manifest.strategy, schema, manifest.task_kind);

  EvalReport rep;
  rep.run_id = manifest.run_id;
  rep.task_kind = manifest.task_kind;
  rep.strategy = to_string(manifest.strategy);
  rep.group = manifest.group;
  rep.option_label = manifest.option_label;
  rep.baseline_label = manifest.baseline_label;
  rep.cell = manifest.cell;
  rep.n = gold.size();

  if (manifest.task_kind == TaskKind::Masa) {
    std::vector<MasaRecord> masa;
    for (const TaskRecord& r : gold) masa.push_back(std::get<MasaRecord>(r));
    const ConfusionSet conf = build_confusion(masa, outcomes, schema);
    rep.confusion = conf.pooled;
    rep.kappa = weighted_kappa(conf.pooled);
    for (const auto& [aspect, m] : conf.per_aspect) {
      AspectKappa ak{aspect, std::nullopt};
      try {
        ak.kappa = weighted_kappa(m);
      } catch (const ValidationError&) {
      }
      rep.per_aspect_kappa.push_back(std::move(ak));
    }
    rep.accuracy = slot_accuracy(masa, outcomes, schema);
  } else {
    std::vector<SpanRecord> spans;
    for (const TaskRecord& r : gold) spans.push_back(std::get<SpanRecord>(r));
    std::vector<IdSpans> pred;
    for (const auto& [id, o] : outcomes) pred.emplace_back(id, o.spans);
    rep.f1_hard = span_f1(spans, pred, MatchMode::Hard);
    rep.f1_soft = span_f1(spans, pred, MatchMode::Soft);
  }
  rep.error_rate = format_error_rate(outcomes);
  return rep;
}

std::string report_to_json(const EvalReport& r) {
  ordered_json j;
  j["run_id"] = r.run_id;
  j["task_kind"] = task_kind_name(r.task_kind);
  j["strategy"] = r.strategy;
  j["group"] = r.group;
  j["option_label"] = r.option_label;
  j["baseline_label"] = r.baseline_label;
  j["cell"] = r.cell;
  j["n"] = r.n;
  j["error_rate"] = r.error_rate;
  if (r.kappa) j["kappa"] = kappa_json(*r.kappa);
  if (r.accuracy) j["accuracy"] = *r.accuracy;
  if (r.task_kind == TaskKind::Masa) {
    ordered_json per = ordered_json::object();
    for (const AspectKappa& ak : r.per_aspect_kappa) {
      per[ak.aspect] = ak.kappa ? kappa_json(*ak.kappa) : ordered_json(nullptr);
    }
    j["per_aspect_kappa"] = per;
  }
  if (r.confusion) j["confusion"] = r.confusion->counts;
  if (r.f1_hard) j["f1_hard"] = match_json(*r.f1_hard);
  if (r.f1_soft) j["f1_soft"] = match_json(*r.f1_soft);
  return j.dump(2);
}

EvalReport report_from_json(std::string_view json_text) {
  const ordered_json j = parse_object(json_text, "report");
  EvalReport r;
  try {
    r.run_id = j.at("run_id").get<std::string>();
    r.task_kind = parse_task_kind(j.at("task_kind").get<std::string>());
    r.strategy = j.value("strategy", "");
    r.group = j.value("group", "");
    r.option_label = j.value("option_label", "");
    r.baseline_label = j.value("baseline_label", "");
    r.cell = j.value("cell", "");
    r.n = j.value("n", std::size_t{0});
    r.error_rate = j.at("error_rate").get<double>();
    if (j.contains("kappa")) r.kappa = kappa_from(j.at("kappa"));
    if (j.contains("accuracy")) r.accuracy = j.at("accuracy").get<double>();
    if (j.contains("per_aspect_kappa")) {
      for (const auto& [aspect, v] : j.at("per_aspect_kappa").items()) {
        r.per_aspect_kappa.push_back(
            {aspect, v.is_null() ? std::nullopt : std::optional<KappaResult>(kappa_from(v))});
      }
    }
    if (j.contains("confusion")) {
      ConfusionMatrix c;
      c.counts = j.at("confusion").get<decltype(c.counts)>();
      r.confusion = c;
    }
    if (j.contains("f1_hard")) r.f1_hard = match_from(j.at("f1_hard"));
    if (j.contains("f1_soft")) r.f1_soft = match_from(j.at("f1_soft"));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("report: ") + e.what());
  }
  if (r.task_kind == TaskKind::Masa && !r.kappa) {
    throw ValidationError("report " + r.run_id + ": MASA report without kappa");
  }
  if (r.task_kind == TaskKind::Span && !r.f1_soft) {
    throw ValidationError("report " + r.run_id + ": span report without F1");
  }
  return r;
}

std::vector<LabelScore> compare_to_baseline(const std::vector<LabelScore>& scores,
                                            std::string_view baseline) {
  auto it = std::find_if(scores.begin(), scores.end(),
                         [&](const LabelScore& s) { return s.first == baseline; });
  if (it == scores.end()) {
    throw ValidationError("baseline '" + std::string(baseline) + "' not among the scores");
  }
  const double base = it->second;
  std::vector<LabelScore> out;
  for (const auto& [label, score] : scores) out.emplace_back(label, score - base);
  return out;
}

double average_delta(const std::vector<ScoreCell>& cells, std::string_view label,
                     std::string_view baseline) {
  if (cells.empty()) throw ValidationError("average delta over no cells");
  double sum = 0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    auto l = cells[i].find(std::string(label));
    auto b = cells[i].find(std::string(baseline));
    if (l == cells[i].end() || b == cells[i].end()) {
      throw ValidationError("cell " + std::to_string(i) + " lacks '" + std::string(label) +
                            "' or the baseline '" + std::string(baseline) + "'");
    }
    sum += l->second - b->second;
  }
  return sum / static_cast<double>(cells.size());
}

double RankingSummary::rank_of(std::string_view option) const {
  for (std::size_t i = 0; i < options.size(); ++i) {
    if (options[i] == option) return mean_rank[i];
  }
  throw ValidationError("no ranking for option '" + std::string(option) + "'");
}

RankingSummary average_rankings(const std::vector<std::string>& options,
                                const std::vector<ScoreCell>& cells) {
  if (options.empty()) throw ValidationError("ranking of no options");
  if (cells.empty()) throw ValidationError("ranking over no cells");
  if (std::set<std::string>(options.begin(), options.end()).size() != options.size()) {
    throw ValidationError("duplicate option in ranking");
  }
  const std::size_t k = options.size();
  RankingSummary out;
  out.options = options;
  out.mean_rank.assign(k, 0.0);
  out.cells = cells.size();
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (cells[c].size() != k) {
      throw ValidationError("ragged grid: cell " + std::to_string(c) + " scores " +
                            std::to_string(cells[c].size()) + " option(s), expected " +
                            std::to_string(k));
    }
    std::vector<double> score(k);
    for (std::size_t i = 0; i < k; ++i) {
      auto it = cells[c].find(options[i]);
      if (it == cells[c].end()) {
        throw ValidationError("ragged grid: cell " + std::to_string(c) + " lacks '" +
                              options[i] + "'");
      }
      score[i] = it->second;
    }
    std::vector<std::size_t> order(k);
    for (std::size_t i = 0; i < k; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
    bool tied = false;
    for (std::size_t start = 0; start < k;) {
      std::size_t end = start + 1;
      while (end < k && score[order[end]] == score[order[start]]) ++end;
      if (end - start > 1) tied = true;
      // Positions start..end-1 hold ranks start+1..end.
      const double rank = (static_cast<double>(start + 1) + static_cast<double>(end)) / 2.0;
      for (std::size_t p = start; p < end; ++p) out.mean_rank[order[p]] += rank;
      start = end;
    }
    if (tied) ++out.tied_cells;
  }
  for (double& r : out.mean_rank) r /= static_cast<double>(cells.size());
  return out;
}

std::vector<GroupReport> summarize_reports(const std::vector<EvalReport>& reports) {
  std::vector<GroupReport> groups;
  std::vector<std::vector<ScoreCell>> cell_scores;
  std::unordered_set<std::string> run_ids;
  for (const EvalReport& r : reports) {
    if (!run_ids.insert(r.run_id).second) {
      throw ValidationError("duplicate run_id '" + r.run_id + "' among reports");
    }
    if (r.group.empty()) continue;
    auto g = std::find_if(groups.begin(), groups.end(),
                          [&](const GroupReport& x) { return x.group == r.group; });
    if (g == groups.end()) {
      groups.push_back({r.group, r.baseline_label, {}, {}, {}, {}});
      cell_scores.emplace_back();
      g = groups.end() - 1;
    }
    auto& cells = cell_scores[static_cast<std::size_t>(g - groups.begin())];
    if (g->baseline != r.baseline_label) {
      throw ValidationError("group " + r.group + ": conflicting baselines '" + g->baseline +
                            "' and '" + r.baseline_label + "'");
    }
    if (std::find(g->options.begin(), g->options.end(), r.option_label) == g->options.end()) {
      g->options.push_back(r.option_label);
    }
    auto c = std::find(g->cells.begin(), g->cells.end(), r.cell);
    if (c == g->cells.end()) {
      g->cells.push_back(r.cell);
      cells.emplace_back();
      c = g->cells.end() - 1;
    }
    ScoreCell& cell = cells[static_cast<std::size_t>(c - g->cells.begin())];
    if (!cell.emplace(r.option_label, r.headline()).second) {
      throw ValidationError("group " + r.group + ", cell '" + r.cell + "': option '" +
                            r.option_label + "' reported twice");
    }
  }
  for (std::size_t i = 0; i < groups.size(); ++i) {
    GroupReport& g = groups[i];
    auto b = std::find(g.options.begin(), g.options.end(), g.baseline);
    if (b == g.options.end()) {
      throw ValidationError("group " + g.group + ": no report for baseline '" + g.baseline + "'");
    }
    std::rotate(g.options.begin(), b, b + 1);
    g.ranking = average_rankings(g.options, cell_scores[i]);
    for (const std::string& o : g.options) {
      g.mean_delta.push_back(average_delta(cell_scores[i], o, g.baseline));
    }
  }
  return groups;
}

std::string summary_to_json(const std::vector<GroupReport>& groups) {
  ordered_json out = ordered_json::object();
  for (const GroupReport& g : groups) {
    ordered_json j;
    j["baseline"] = g.baseline;
    j["cells"] = g.cells;
    ordered_json delta = ordered_json::object();
    ordered_json rank = ordered_json::object();
    for (std::size_t i = 0; i < g.options.size(); ++i) {
      delta[g.options[i]] = g.mean_delta[i];
      rank[g.options[i]] = g.ranking.mean_rank[i];
    }
    j["mean_delta"] = delta;
    j["mean_rank"] = rank;
    j["tied_cells"] = g.ranking.tied_cells;
    out[g.group] = j;
  }
  return out.dump(2);
}

std::string summary_table(const std::vector<GroupReport>& groups) {
  std::ostringstream os;
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const GroupReport& g = groups[gi];
    if (gi) os << '\n';
    os << g.group << " (baseline: " << g.baseline << ", " << g.cells.size()
       << (g.cells.size() == 1 ? " cell" : " cells") << ")\n";
    std::size_t width = std::string_view("option").size();
    for (const std::string& o : g.options) width = std::max(width, o.size());
    os << std::left << std::setw(static_cast<int>(width)) << "option" << "  " << std::right
       << std::setw(10) << "delta" << "  " << std::setw(9) << "mean_rank" << '\n';
    for (std::size_t i = 0; i < g.options.size(); ++i) {
      double delta = g.mean_delta[i];
      if (std::abs(delta) < 5e-5) delta = 0.0;  // no "-0.0000"
      os << std::left << std::setw(static_cast<int>(width)) << g.options[i] << "  "
         << std::right << std::showpos << std::fixed << std::setprecision(4) << std::setw(10)
         << delta << std::noshowpos << "  " << std::setprecision(2) << std::setw(9)
         << g.ranking.mean_rank[i] << '\n';
    }
  }
  return os.str();
}

std::vector<EvalReport> load_reports(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw IoError("not a directory: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.size() > 12 &&
        name.substr(name.size() - 12) == ".report.json") {
      files.push_back(entry.path());
    }
  }
  if (ec) throw IoError("cannot list " + dir.string() + ": " + ec.message());
  std::sort(files.begin(), files.end());
  std::vector<EvalReport> out;
  for (const auto& f : files) {
    try {
      out.push_back(report_from_json(text::read_file(f)));
    } catch (const ValidationError& e) {
      throw ValidationError(f.string() + ": " + e.what());
    }
  }
  return out;
}

}  // namespace sde
