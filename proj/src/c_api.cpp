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


#include "sdekit/sdekit.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sdekit/design.hpp"
#include "sdekit/errors.hpp"
#include "sdekit/harness.hpp"
#include "sdekit/metrics.hpp"
#include "sdekit/parse.hpp"
#include "sdekit/render.hpp"
#include "sdekit/schema.hpp"
#include "text_util.hpp"

struct sde_schema {
  sde::AspectSchema value;
};
struct sde_strategy {
  sde::DesignStrategy value;
};
struct sde_template {
  sde::PromptTemplate value;
};
struct sde_corpus {
  sde::TaskKind kind;
  std::vector<sde::TaskRecord> records;
};

namespace {

thread_local std::string g_last_error;

class InvalidArgument : public std::exception {
 public:
  explicit InvalidArgument(std::string m) : message_(std::move(m)) {}
  const char* what() const noexcept override { return message_.c_str(); }

 private:
  std::string message_;
};

template <typename F>
sde_status guard(F&& body) {
  g_last_error.clear();
  try {
    body();
    return SDE_OK;
  } catch (const sde::IoError& e) {
    g_last_error = e.what();
    return SDE_ERR_IO;
  } catch (const sde::Error& e) {
    g_last_error = e.what();
    return SDE_ERR_VALIDATION;
  } catch (const nlohmann::json::exception& e) {
    g_last_error = e.what();
    return SDE_ERR_VALIDATION;
  } catch (const InvalidArgument& e) {
    g_last_error = e.what();
    return SDE_ERR_INVALID_ARGUMENT;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return SDE_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SDE_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return SDE_ERR_INTERNAL;
  }
}

template <typename T>
void require(const T* p, const char* name) {
  if (p == nullptr) throw InvalidArgument(std::string(name) + " is NULL");
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

sde::TaskKind kind_of(sde_task_kind k) {
  switch (k) {
    case SDE_TASK_MASA: return sde::TaskKind::Masa;
    case SDE_TASK_SPAN: return sde::TaskKind::Span;
  }
  throw InvalidArgument("unknown task kind " + std::to_string(static_cast<int>(k)));
}

sde::LabelDistribution distribution(const char* name_or_path) {
  const std::string s = name_or_path;
  for (std::string_view n : sde::builtin_distribution_names()) {
    if (n == s) return sde::builtin_distribution(s);
  }
  return sde::load_distribution(s);
}

std::vector<std::string> jsonl_lines(const std::string& path) {
  const std::string content = sde::text::read_file(path);
  std::vector<std::string> out;
  for (std::string_view line : sde::text::split_lines(content)) {
    if (!sde::text::trim(line).empty()) out.emplace_back(line);
  }
  return out;
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const std::string& l : lines) {
    out += l;
    out += '\n';
  }
  return out;
}

}  // namespace

extern "C" {

const char* sde_version(void) { return "1.0.0"; }

const char* sde_last_error(void) { return g_last_error.c_str(); }

void sde_string_free(char* s) { std::free(s); }

sde_status sde_schema_builtin(const char* name, sde_schema** out) {
  return guard([&] {
    require(name, "name");
    require(out, "out");
    *out = new sde_schema{sde::builtin_schema(name)};
  });
}

sde_status sde_schema_load(const char* path, sde_schema** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = new sde_schema{sde::load_schema(path)};
  });
}

sde_status sde_schema_to_json(const sde_schema* schema, char** out) {
  return guard([&] {
    require(schema, "schema");
    require(out, "out");
    *out = dup(sde::schema_to_json(schema->value));
  });
}

void sde_schema_free(sde_schema* schema) { delete schema; }

sde_status sde_strategy_parse(const char* text, sde_strategy** out) {
  return guard([&] {
    require(text, "text");
    require(out, "out");
    *out = new sde_strategy{sde::parse_strategy(text)};
  });
}

sde_status sde_strategy_to_string(const sde_strategy* strategy, char** out) {
  return guard([&] {
    require(strategy, "strategy");
    require(out, "out");
    *out = dup(sde::to_string(strategy->value));
  });
}

void sde_strategy_free(sde_strategy* strategy) { delete strategy; }

sde_status sde_template_default(sde_task_kind kind, sde_template** out) {
  return guard([&] {
    require(out, "out");
    *out = new sde_template{sde::default_template(kind_of(kind))};
  });
}

sde_status sde_template_load(const char* path, sde_template** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = new sde_template{sde::load_template(path)};
  });
}

void sde_template_free(sde_template* tmpl) { delete tmpl; }

sde_status sde_corpus_load(const char* path, sde_task_kind kind, const sde_schema* schema,
                           sde_corpus** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    const sde::TaskKind k = kind_of(kind);
    *out = new sde_corpus{k, sde::load_corpus(path, k, schema ? &schema->value : nullptr)};
  });
}

sde_status sde_corpus_generate(const sde_schema* schema, const char* dist, size_t n,
                               uint64_t seed, sde_corpus** out) {
  return guard([&] {
    require(schema, "schema");
    require(dist, "distribution");
    require(out, "out");
    auto records = sde::generate_fixture_corpus(schema->value, distribution(dist), n, seed);
    auto* c = new sde_corpus{sde::TaskKind::Masa, {}};
    c->records.assign(records.begin(), records.end());
    *out = c;
  });
}

sde_status sde_corpus_save(const sde_corpus* corpus, const char* path) {
  return guard([&] {
    require(corpus, "corpus");
    require(path, "path");
    sde::save_corpus(corpus->records, path);
  });
}

size_t sde_corpus_size(const sde_corpus* corpus) {
  return corpus ? corpus->records.size() : 0;
}

void sde_corpus_free(sde_corpus* corpus) { delete corpus; }

sde_status sde_render_corpus(const sde_corpus* corpus, const sde_schema* schema,
                             const sde_strategy* strategy, const sde_template* tmpl,
                             size_t variant, char** out_jsonl) {
  return guard([&] {
    require(corpus, "corpus");
    require(schema, "schema");
    require(strategy, "strategy");
    require(out_jsonl, "out_jsonl");
    const sde::PromptTemplate t = tmpl ? tmpl->value : sde::default_template(corpus->kind);
    std::vector<std::string> lines;
    for (const auto& s :
         sde::render_corpus(corpus->records, schema->value, strategy->value, t, variant)) {
      lines.push_back(sde::sample_to_json(s));
    }
    *out_jsonl = dup(join_lines(lines));
  });
}

sde_status sde_parse_predictions(const char* predictions_path, const sde_schema* schema,
                                 const sde_strategy* strategy, sde_task_kind kind,
                                 char** out_jsonl) {
  return guard([&] {
    require(predictions_path, "predictions_path");
    require(schema, "schema");
    require(strategy, "strategy");
    require(out_jsonl, "out_jsonl");
    const auto outputs = sde::load_predictions(predictions_path);
    std::vector<std::string> lines;
    for (const auto& [id, o] :
         sde::batch_parse(outputs, strategy->value, schema->value, kind_of(kind))) {
      lines.push_back(sde::outcome_to_json(id, o));
    }
    *out_jsonl = dup(join_lines(lines));
  });
}

sde_status sde_echo_samples(const char* samples_path, char** out_jsonl) {
  return guard([&] {
    require(samples_path, "samples_path");
    require(out_jsonl, "out_jsonl");
    std::vector<std::string> lines;
    std::size_t line_no = 0;
    for (const std::string& line : jsonl_lines(samples_path)) {
      ++line_no;
      const auto j = nlohmann::ordered_json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object() || !j.contains("id") || !j.contains("response")) {
        throw sde::ValidationError("sample line " + std::to_string(line_no) +
                                   ": expected an object with \"id\" and \"response\"");
      }
      nlohmann::ordered_json p;
      p["id"] = j["id"];
      p["output"] = j["response"];
      lines.push_back(p.dump());
    }
    *out_jsonl = dup(join_lines(lines));
  });
}

sde_status sde_grid(const sde_strategy* baseline, const char* group,
                    const char* base_manifest_json, const char* run_id_prefix,
                    char** out_json) {
  return guard([&] {
    require(baseline, "baseline");
    require(group, "group");
    require(out_json, "out_json");
    sde::RunManifest base;
    if (base_manifest_json != nullptr) {
      base = sde::manifest_from_json(base_manifest_json);
    } else {
      base.run_id = "run";
      base.task_id = "d1";
    }
    base.strategy = baseline->value;
    const std::string prefix = run_id_prefix ? run_id_prefix : base.run_id;
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& m : sde::grid_manifests(base, sde::parse_group(group), prefix)) {
      arr.push_back(nlohmann::ordered_json::parse(sde::manifest_to_json(m)));
    }
    *out_json = dup(arr.dump(2));
  });
}

sde_status sde_emit_run(const char* manifest_path, const char* corpus_path,
                        const char* test_path, const char* template_path,
                        const char* out_dir) {
  return guard([&] {
    require(manifest_path, "manifest_path");
    require(corpus_path, "corpus_path");
    require(out_dir, "out_dir");
    const sde::RunManifest m = sde::load_manifest(manifest_path);
    const sde::AspectSchema schema = sde::manifest_schema(m);
    const auto corpus = sde::load_corpus(corpus_path, m.task_kind, &schema);
    std::vector<sde::TaskRecord> test;
    if (test_path != nullptr) test = sde::load_corpus(test_path, m.task_kind, &schema);
    const sde::PromptTemplate t =
        template_path ? sde::load_template(template_path) : sde::default_template(m.task_kind);
    sde::emit_run(m, corpus, test, t, out_dir);
  });
}

sde_status sde_score(const char* manifest_path, const sde_strategy* strategy,
                     const sde_schema* schema, sde_task_kind kind, const char* gold_path,
                     const char* predictions_path, char** out_json) {
  return guard([&] {
    require(gold_path, "gold_path");
    require(predictions_path, "predictions_path");
    require(out_json, "out_json");
    sde::RunManifest m;
    std::optional<sde::AspectSchema> inline_schema;
    if (manifest_path != nullptr) {
      m = sde::load_manifest(manifest_path);
    } else {
      require(strategy, "strategy");
      require(schema, "schema");
      m.run_id = "run";
      m.task_id = schema->value.task_id;
      m.task_kind = kind_of(kind);
      m.strategy = strategy->value;
      inline_schema = schema->value;
    }
    const sde::AspectSchema s = inline_schema ? *inline_schema : sde::manifest_schema(m);
    const auto gold = sde::load_corpus(gold_path, m.task_kind, &s);
    const auto preds = sde::load_predictions(predictions_path);
    const sde::EvalReport rep = sde::score_run(m, s, gold, preds);
    *out_json = dup(sde::report_to_json(rep));
  });
}

sde_status sde_report(const char* reports_dir, char** out_json, char** out_table) {
  return guard([&] {
    require(reports_dir, "reports_dir");
    require(out_json, "out_json");
    const auto groups = sde::summarize_reports(sde::load_reports(reports_dir));
    std::string json = sde::summary_to_json(groups);
    std::string table = out_table ? sde::summary_table(groups) : std::string();
    *out_json = dup(json);
    if (out_table) *out_table = dup(table);
  });
}

sde_status sde_weighted_kappa(const uint64_t counts[16], const double* weights,
                              sde_kappa* out) {
  return guard([&] {
    require(counts, "counts");
    require(out, "out");
    sde::ConfusionMatrix c;
    for (std::size_t i = 0; i < 16; ++i) c.counts[i / 4][i % 4] = counts[i];
    sde::WeightMatrix w = sde::default_weights();
    if (weights != nullptr) {
      for (std::size_t i = 0; i < 16; ++i) w.w[i / 4][i % 4] = weights[i];
    }
    const sde::KappaResult k = sde::weighted_kappa(c, w);
    *out = {k.po, k.pe, k.kappa};
  });
}

sde_status sde_perplexity_of(const double* nlls, size_t n, long long context_boundary,
                             sde_perplexity* out) {
  return guard([&] {
    if (n > 0) require(nlls, "nlls");
    require(out, "out");
    std::vector<double> v(nlls, nlls + n);
    std::optional<std::size_t> b;
    if (context_boundary >= 0) b = static_cast<std::size_t>(context_boundary);
    const sde::PerplexityResult r = sde::perplexity(v, b);
    *out = {r.token_count, r.mean_nll, r.ppl};
  });
}

sde_status sde_perplexity_file(const char* path, char** out_jsonl) {
  return guard([&] {
    require(path, "path");
    require(out_jsonl, "out_jsonl");
    std::vector<std::string> lines;
    for (const sde::NllRecord& r : sde::parse_nll_jsonl(sde::text::read_file(path))) {
      sde::PerplexityResult p;
      try {
        p = sde::perplexity(r.nlls, r.context_boundary);
      } catch (const sde::ValidationError& e) {
        throw sde::ValidationError("record " + r.id + ": " + e.what());
      }
      nlohmann::ordered_json j;
      j["id"] = r.id;
      j["token_count"] = p.token_count;
      j["mean_nll"] = p.mean_nll;
      j["ppl"] = p.ppl;
      lines.push_back(j.dump());
    }
    *out_jsonl = dup(join_lines(lines));
  });
}

}  // extern "C"
