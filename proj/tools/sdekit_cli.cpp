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


// Command-line front end. Talks to the library only through sdekit.h.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "sdekit/sdekit.h"

namespace {

// Carries a library status out of a subcommand.
struct Failure {
  sde_status status;
  std::string message;
};

void check(sde_status s) {
  if (s != SDE_OK) throw Failure{s, sde_last_error()};
}

struct StringDeleter {
  void operator()(char* p) const { sde_string_free(p); }
};
using OwnedString = std::unique_ptr<char, StringDeleter>;

template <typename T, void (*Free)(T*)>
struct HandleDeleter {
  void operator()(T* p) const { Free(p); }
};
using Schema = std::unique_ptr<sde_schema, HandleDeleter<sde_schema, sde_schema_free>>;
using Strategy = std::unique_ptr<sde_strategy, HandleDeleter<sde_strategy, sde_strategy_free>>;
using Template = std::unique_ptr<sde_template, HandleDeleter<sde_template, sde_template_free>>;
using Corpus = std::unique_ptr<sde_corpus, HandleDeleter<sde_corpus, sde_corpus_free>>;

Schema open_schema(const std::string& name_or_path) {
  sde_schema* s = nullptr;
  std::error_code ec;
  if (std::filesystem::is_regular_file(name_or_path, ec)) {
    check(sde_schema_load(name_or_path.c_str(), &s));
  } else {
    check(sde_schema_builtin(name_or_path.c_str(), &s));
  }
  return Schema(s);
}

Strategy open_strategy(const std::string& text) {
  sde_strategy* s = nullptr;
  check(sde_strategy_parse(text.c_str(), &s));
  return Strategy(s);
}

sde_task_kind task_kind(const std::string& name) {
  return name == "span" ? SDE_TASK_SPAN : SDE_TASK_MASA;
}

Template open_template(const std::string& path, sde_task_kind kind) {
  sde_template* t = nullptr;
  if (path.empty()) {
    check(sde_template_default(kind, &t));
  } else {
    check(sde_template_load(path.c_str(), &t));
  }
  return Template(t);
}

void emit(const std::string& path, const char* content) {
  if (path.empty() || path == "-") {
    std::fputs(content, stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw Failure{SDE_ERR_IO, "cannot write " + path};
}

std::string ensure_newline(std::string s) {
  if (!s.empty() && s.back() != '\n') s += '\n';
  return s;
}

int exit_code(sde_status s) {
  switch (s) {
    case SDE_OK: return 0;
    case SDE_ERR_IO: return 2;
    case SDE_ERR_INTERNAL: return 3;
    default: return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sdekit: render, parse and score fine-tuning sample designs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(sde_version()));

  const std::vector<std::string> kinds = {"masa", "span"};

  // fixtures
  std::string fx_schema = "d1", fx_dist = "d1-train500", fx_out;
  std::size_t fx_n = 1000;
  std::uint64_t fx_seed = 7;
  auto* fixtures = app.add_subcommand("fixtures", "Generate a synthetic MASA corpus");
  fixtures->add_option("--schema", fx_schema, "Built-in schema name or schema JSON file")
      ->capture_default_str();
  fixtures->add_option("--dist", fx_dist, "Built-in distribution name or JSON file")
      ->capture_default_str();
  fixtures->add_option("-n,--count", fx_n, "Number of records")->capture_default_str();
  fixtures->add_option("--seed", fx_seed, "Generator seed")->capture_default_str();
  fixtures->add_option("-o,--out", fx_out, "Output JSONL")->required();

  // render
  std::string rd_corpus, rd_schema = "d1", rd_strategy, rd_template, rd_out, rd_kind = "masa";
  std::size_t rd_variant = 0;
  auto* render = app.add_subcommand("render", "Render training samples for a strategy");
  render->add_option("--corpus", rd_corpus, "Corpus JSONL")->required();
  render->add_option("--schema", rd_schema, "Schema name or file")->capture_default_str();
  render->add_option("--kind", rd_kind, "Task kind")
      ->check(CLI::IsMember(kinds))
      ->capture_default_str();
  render->add_option("--strategy", rd_strategy, "Strategy string or preset")->required();
  render->add_option("--variant", rd_variant, "Instruction variant")->capture_default_str();
  render->add_option("--template", rd_template, "Template JSON file");
  render->add_option("-o,--out", rd_out, "Output JSONL (default stdout)");

  // echo
  std::string ec_samples, ec_out;
  auto* echo = app.add_subcommand("echo", "Turn rendered samples into gold-echo predictions");
  echo->add_option("--samples", ec_samples, "Samples JSONL")->required();
  echo->add_option("-o,--out", ec_out, "Output JSONL (default stdout)");

  // grid
  std::string gr_baseline, gr_group, gr_base, gr_prefix, gr_dir, gr_out;
  auto* grid = app.add_subcommand("grid", "Write the manifests of an ablation group");
  grid->add_option("--baseline", gr_baseline, "Baseline strategy string or preset")
      ->required();
  grid->add_option("--group", gr_group, "input, output or reasoning")->required();
  grid->add_option("--base-manifest", gr_base, "Manifest supplying the other fields");
  grid->add_option("--prefix", gr_prefix, "Run id prefix");
  grid->add_option("--out-dir", gr_dir, "Write one <run_id>.manifest.json per row here");
  grid->add_option("-o,--out", gr_out, "Write the JSON array here (default stdout)");

  // emit
  std::string em_manifest, em_corpus, em_test, em_template, em_dir;
  auto* emit_cmd = app.add_subcommand("emit", "Write a run's dataset files");
  emit_cmd->add_option("--manifest", em_manifest, "Run manifest")->required();
  emit_cmd->add_option("--corpus", em_corpus, "Training corpus JSONL")->required();
  emit_cmd->add_option("--test", em_test, "Test corpus JSONL");
  emit_cmd->add_option("--template", em_template, "Template JSON file");
  emit_cmd->add_option("--out-dir", em_dir, "Output directory")->required();

  // parse
  std::string ps_pred, ps_schema = "d1", ps_strategy, ps_out, ps_kind = "masa";
  auto* parse = app.add_subcommand("parse", "Parse raw predictions into outcomes");
  parse->add_option("--predictions", ps_pred, "Predictions JSONL {id, output}")->required();
  parse->add_option("--schema", ps_schema, "Schema name or file")->capture_default_str();
  parse->add_option("--kind", ps_kind, "Task kind")
      ->check(CLI::IsMember(kinds))
      ->capture_default_str();
  parse->add_option("--strategy", ps_strategy, "Strategy string or preset")->required();
  parse->add_option("-o,--out", ps_out, "Output JSONL (default stdout)");

  // score
  std::string sc_manifest, sc_strategy, sc_schema = "d1", sc_kind = "masa", sc_gold, sc_pred,
                                                sc_out;
  auto* score = app.add_subcommand("score", "Score predictions against gold records");
  auto* sc_m = score->add_option("--manifest", sc_manifest, "Run manifest");
  auto* sc_s = score->add_option("--strategy", sc_strategy, "Strategy (without a manifest)");
  sc_m->excludes(sc_s);
  score->add_option("--schema", sc_schema, "Schema name or file (without a manifest)")
      ->capture_default_str();
  score->add_option("--kind", sc_kind, "Task kind (without a manifest)")
      ->check(CLI::IsMember(kinds))
      ->capture_default_str();
  score->add_option("--gold", sc_gold, "Gold corpus JSONL")->required();
  score->add_option("--predictions", sc_pred, "Predictions JSONL {id, output}")->required();
  score->add_option("-o,--out", sc_out, "Report JSON (default stdout)");

  // report
  std::string rp_dir, rp_json, rp_table;
  auto* report = app.add_subcommand("report", "Deltas and rankings over a reports directory");
  report->add_option("--reports", rp_dir, "Directory of *.report.json files")->required();
  report->add_option("--json", rp_json, "Write the JSON summary here");
  report->add_option("--table", rp_table, "Write the text table here (default stdout)");

  // perplexity
  std::string pp_in, pp_out;
  auto* ppl = app.add_subcommand("perplexity", "Perplexity from token log-likelihoods");
  ppl->add_option("--nlls", pp_in, "JSONL {id, nlls, context_boundary}")->required();
  ppl->add_option("-o,--out", pp_out, "Output JSONL (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*fixtures) {
      Schema schema = open_schema(fx_schema);
      sde_corpus* c = nullptr;
      check(sde_corpus_generate(schema.get(), fx_dist.c_str(), fx_n, fx_seed, &c));
      Corpus corpus(c);
      check(sde_corpus_save(corpus.get(), fx_out.c_str()));
    } else if (*render) {
      Schema schema = open_schema(rd_schema);
      Strategy strategy = open_strategy(rd_strategy);
      const sde_task_kind kind = task_kind(rd_kind);
      Template tmpl = open_template(rd_template, kind);
      sde_corpus* c = nullptr;
      check(sde_corpus_load(rd_corpus.c_str(), kind, schema.get(), &c));
      Corpus corpus(c);
      char* out = nullptr;
      check(sde_render_corpus(corpus.get(), schema.get(), strategy.get(), tmpl.get(),
                              rd_variant, &out));
      OwnedString owned(out);
      emit(rd_out, out);
    } else if (*echo) {
      char* out = nullptr;
      check(sde_echo_samples(ec_samples.c_str(), &out));
      OwnedString owned(out);
      emit(ec_out, out);
    } else if (*grid) {
      Strategy baseline = open_strategy(gr_baseline);
      std::string base_json;
      if (!gr_base.empty()) {
        std::ifstream in(gr_base, std::ios::binary);
        if (!in) throw Failure{SDE_ERR_IO, "cannot read " + gr_base};
        base_json.assign(std::istreambuf_iterator<char>(in), {});
      }
      char* out = nullptr;
      check(sde_grid(baseline.get(), gr_group.c_str(),
                     gr_base.empty() ? nullptr : base_json.c_str(),
                     gr_prefix.empty() ? nullptr : gr_prefix.c_str(), &out));
      OwnedString owned(out);
      if (!gr_dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(gr_dir, ec);
        if (ec) throw Failure{SDE_ERR_IO, "cannot create " + gr_dir};
        const auto arr = nlohmann::ordered_json::parse(out);
        for (const auto& m : arr) {
          const std::string path =
              (std::filesystem::path(gr_dir) / (m["run_id"].get<std::string>() + ".manifest.json"))
                  .string();
          emit(path, ensure_newline(m.dump(2)).c_str());
        }
      }
      if (gr_dir.empty() || !gr_out.empty()) emit(gr_out, ensure_newline(out).c_str());
    } else if (*emit_cmd) {
      check(sde_emit_run(em_manifest.c_str(), em_corpus.c_str(),
                         em_test.empty() ? nullptr : em_test.c_str(),
                         em_template.empty() ? nullptr : em_template.c_str(), em_dir.c_str()));
    } else if (*parse) {
      Schema schema = open_schema(ps_schema);
      Strategy strategy = open_strategy(ps_strategy);
      char* out = nullptr;
      check(sde_parse_predictions(ps_pred.c_str(), schema.get(), strategy.get(),
                                  task_kind(ps_kind), &out));
      OwnedString owned(out);
      emit(ps_out, out);
    } else if (*score) {
      char* out = nullptr;
      if (!sc_manifest.empty()) {
        check(sde_score(sc_manifest.c_str(), nullptr, nullptr, SDE_TASK_MASA, sc_gold.c_str(),
                        sc_pred.c_str(), &out));
      } else {
        if (sc_strategy.empty()) {
          throw Failure{SDE_ERR_VALIDATION, "score needs --manifest or --strategy"};
        }
        Schema schema = open_schema(sc_schema);
        Strategy strategy = open_strategy(sc_strategy);
        check(sde_score(nullptr, strategy.get(), schema.get(), task_kind(sc_kind),
                        sc_gold.c_str(), sc_pred.c_str(), &out));
      }
      OwnedString owned(out);
      emit(sc_out, ensure_newline(out).c_str());
    } else if (*report) {
      char* json = nullptr;
      char* table = nullptr;
      check(sde_report(rp_dir.c_str(), &json, &table));
      OwnedString owned_json(json);
      OwnedString owned_table(table);
      if (!rp_json.empty()) emit(rp_json, ensure_newline(json).c_str());
      emit(rp_table, table);
    } else if (*ppl) {
      char* out = nullptr;
      check(sde_perplexity_file(pp_in.c_str(), &out));
      OwnedString owned(out);
      emit(pp_out, out);
    }
  } catch (const Failure& f) {
    std::cerr << "sdekit: " << f.message << '\n';
    return exit_code(f.status);
  } catch (const std::exception& e) {
    std::cerr << "sdekit: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
