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


// Exercises the shared library through its C header only.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "sdekit/sdekit.h"

namespace {

namespace fs = std::filesystem;

struct CString {
  char* p = nullptr;
  ~CString() { sde_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

template <typename T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  ~Handle() { Free(p); }
};

using Schema = Handle<sde_schema, sde_schema_free>;
using Strategy = Handle<sde_strategy, sde_strategy_free>;
using Template = Handle<sde_template, sde_template_free>;
using Corpus = Handle<sde_corpus, sde_corpus_free>;

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / "sdekit_c_api") {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

}  // namespace

TEST_CASE("version and error reporting") {
  CHECK(std::string(sde_version()) == "1.0.0");
  Schema s;
  CHECK(sde_schema_builtin("d9", &s.p) == SDE_ERR_VALIDATION);
  CHECK(s.p == nullptr);
  CHECK(std::string(sde_last_error()).find("d9") != std::string::npos);
  CHECK(sde_schema_builtin("d1", &s.p) == SDE_OK);
  CHECK(std::string(sde_last_error()).empty());
  CHECK(sde_schema_builtin(nullptr, &s.p) == SDE_ERR_INVALID_ARGUMENT);
  CHECK(sde_schema_builtin("d1", nullptr) == SDE_ERR_INVALID_ARGUMENT);
  Schema missing;
  CHECK(sde_schema_load("/nonexistent/schema.json", &missing.p) == SDE_ERR_IO);
  sde_string_free(nullptr);
  sde_schema_free(nullptr);
  sde_corpus_free(nullptr);
}

TEST_CASE("handles and strings") {
  Schema s;
  REQUIRE(sde_schema_builtin("d2", &s.p) == SDE_OK);
  CString json;
  REQUIRE(sde_schema_to_json(s.p, &json.p) == SDE_OK);
  CHECK(nlohmann::json::parse(json.str())["aspects"].size() == 5);

  Strategy st;
  REQUIRE(sde_strategy_parse("ES-SDE", &st.p) == SDE_OK);
  CString text;
  REQUIRE(sde_strategy_to_string(st.p, &text.p) == SDE_OK);
  CHECK(text.str() == "inst_first/no_mi/lines/pu/txt/no_cot");
  Strategy bad;
  CHECK(sde_strategy_parse("inst_first/x", &bad.p) == SDE_ERR_VALIDATION);

  Template t;
  CHECK(sde_template_default(SDE_TASK_SPAN, &t.p) == SDE_OK);
  CHECK(sde_template_default(static_cast<sde_task_kind>(7), &t.p) ==
        SDE_ERR_INVALID_ARGUMENT);
}

TEST_CASE("generate, render, echo, score") {
  TempDir dir;
  Schema s;
  Strategy st;
  Template t;
  Corpus c;
  REQUIRE(sde_schema_builtin("d1", &s.p) == SDE_OK);
  REQUIRE(sde_strategy_parse("es-sde", &st.p) == SDE_OK);
  REQUIRE(sde_template_default(SDE_TASK_MASA, &t.p) == SDE_OK);
  REQUIRE(sde_corpus_generate(s.p, "d1-train500", 50, 7, &c.p) == SDE_OK);
  CHECK(sde_corpus_size(c.p) == 50);
  const fs::path corpus = dir.path / "c.jsonl";
  REQUIRE(sde_corpus_save(c.p, corpus.c_str()) == SDE_OK);

  Corpus loaded;
  REQUIRE(sde_corpus_load(corpus.c_str(), SDE_TASK_MASA, s.p, &loaded.p) == SDE_OK);
  CHECK(sde_corpus_size(loaded.p) == 50);
  Corpus wrong;
  CHECK(sde_corpus_load(corpus.c_str(), SDE_TASK_SPAN, nullptr, &wrong.p) ==
        SDE_ERR_VALIDATION);

  CString samples;
  REQUIRE(sde_render_corpus(loaded.p, s.p, st.p, t.p, 0, &samples.p) == SDE_OK);
  write(dir.path / "s.jsonl", samples.str());
  CString preds;
  REQUIRE(sde_echo_samples((dir.path / "s.jsonl").c_str(), &preds.p) == SDE_OK);
  write(dir.path / "p.jsonl", preds.str());

  CString outcomes;
  REQUIRE(sde_parse_predictions((dir.path / "p.jsonl").c_str(), s.p, st.p, SDE_TASK_MASA,
                                &outcomes.p) == SDE_OK);
  CHECK(outcomes.str().find("\"format_error\":true") == std::string::npos);

  CString report;
  REQUIRE(sde_score(nullptr, st.p, s.p, SDE_TASK_MASA, corpus.c_str(),
                    (dir.path / "p.jsonl").c_str(), &report.p) == SDE_OK);
  const auto rep = nlohmann::json::parse(report.str());
  CHECK(rep["kappa"]["kappa"] == 1.0);
  CHECK(rep["error_rate"] == 0.0);

  CString none;
  CHECK(sde_score(nullptr, nullptr, s.p, SDE_TASK_MASA, corpus.c_str(),
                  (dir.path / "p.jsonl").c_str(), &none.p) == SDE_ERR_INVALID_ARGUMENT);
  CHECK(none.p == nullptr);
  CHECK(sde_score(nullptr, st.p, s.p, SDE_TASK_MASA, corpus.c_str(), "/nonexistent",
                  &none.p) == SDE_ERR_IO);

  CString with_default;
  REQUIRE(sde_render_corpus(loaded.p, s.p, st.p, nullptr, 0, &with_default.p) == SDE_OK);
  CHECK(with_default.str() == samples.str());
  CString no_corpus;
  CHECK(sde_render_corpus(nullptr, s.p, st.p, t.p, 0, &no_corpus.p) ==
        SDE_ERR_INVALID_ARGUMENT);
  CString out_of_range;
  CHECK(sde_render_corpus(loaded.p, s.p, st.p, t.p, 9, &out_of_range.p) == SDE_ERR_VALIDATION);
}

TEST_CASE("grid, emit and report") {
  TempDir dir;
  Strategy base;
  REQUIRE(sde_strategy_parse("inst_last/no_mi/natural/pu/txt/no_cot", &base.p) == SDE_OK);
  CString grid;
  REQUIRE(sde_grid(base.p, "reasoning", R"({"run_id":"x","task_id":"d1","strategy":"es-sde","train_size":5})",
                   "r", &grid.p) == SDE_OK);
  const auto manifests = nlohmann::json::parse(grid.str());
  REQUIRE(manifests.size() == 3);
  CHECK(manifests[1]["option_label"] == "CoT");
  CHECK(manifests[2]["strategy"] == "inst_last/no_mi/natural/pu/txt/rcot");
  CString bad_group;
  CHECK(sde_grid(base.p, "decoding", nullptr, "r", &bad_group.p) == SDE_ERR_VALIDATION);

  Schema s;
  Corpus c;
  REQUIRE(sde_schema_builtin("d1", &s.p) == SDE_OK);
  REQUIRE(sde_corpus_generate(s.p, "d1-train500", 10, 1, &c.p) == SDE_OK);
  REQUIRE(sde_corpus_save(c.p, (dir.path / "c.jsonl").c_str()) == SDE_OK);
  write(dir.path / "m.json", manifests[0].dump());
  REQUIRE(sde_emit_run((dir.path / "m.json").c_str(), (dir.path / "c.jsonl").c_str(),
                       (dir.path / "c.jsonl").c_str(), nullptr,
                       (dir.path / "out").c_str()) == SDE_OK);
  CHECK(fs::exists(dir.path / "out" / "r-0.samples.jsonl"));
  CHECK(fs::exists(dir.path / "out" / "r-0.eval.jsonl"));

  CString json, table;
  CHECK(sde_report((dir.path / "nothing").c_str(), &json.p, &table.p) == SDE_ERR_IO);
}

TEST_CASE("kappa and perplexity") {
  const uint64_t diag[16] = {5, 0, 0, 0, 0, 5, 0, 0, 0, 0, 5, 0, 0, 0, 0, 5};
  sde_kappa k{};
  REQUIRE(sde_weighted_kappa(diag, nullptr, &k) == SDE_OK);
  CHECK(k.kappa == 1.0);
  CHECK(k.po == 1.0);

  const uint64_t band[16] = {5, 1, 0, 0, 1, 5, 1, 0, 0, 1, 5, 1, 0, 0, 1, 5};
  REQUIRE(sde_weighted_kappa(band, nullptr, &k) == SDE_OK);
  CHECK(std::abs(k.kappa - 1179.0 / 1595.0) <= 1e-12);

  const uint64_t one_cell[16] = {4};
  CHECK(sde_weighted_kappa(one_cell, nullptr, &k) == SDE_ERR_VALIDATION);
  double weights[16] = {};
  CHECK(sde_weighted_kappa(diag, weights, &k) == SDE_ERR_VALIDATION);
  CHECK(sde_weighted_kappa(nullptr, nullptr, &k) == SDE_ERR_INVALID_ARGUMENT);

  const double nlls[4] = {9.0, 1.0, 2.0, 3.0};
  sde_perplexity p{};
  REQUIRE(sde_perplexity_of(nlls, 4, 1, &p) == SDE_OK);
  CHECK(p.token_count == 3);
  CHECK(p.mean_nll == 2.0);
  CHECK(p.ppl == std::exp(2.0));
  REQUIRE(sde_perplexity_of(nlls, 4, -1, &p) == SDE_OK);
  CHECK(p.token_count == 4);
  CHECK(sde_perplexity_of(nlls, 4, 4, &p) == SDE_ERR_VALIDATION);
  CHECK(sde_perplexity_of(nullptr, 4, -1, &p) == SDE_ERR_INVALID_ARGUMENT);
}
