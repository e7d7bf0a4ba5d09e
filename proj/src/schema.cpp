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

#include "sdekit/schema.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "json.hpp"
#include "sdekit/errors.hpp"
#include "text_util.hpp"

namespace sde {

using ojson = nlohmann::ordered_json;

namespace {

constexpr std::array<std::string_view, 4> kLabelNames = {
    "positive", "neutral", "negative", "unmentioned"};

std::string squote(std::string_view s) { return "'" + std::string(s) + "'"; }

}  // namespace

std::string_view label_name(SentimentLabel label) {
  return kLabelNames[label_index(label)];
}

std::optional<SentimentLabel> label_from_name(std::string_view name) {
  for (SentimentLabel l : kAllLabels) {
    if (label_name(l) == name) return l;
  }
  return std::nullopt;
}

std::string_view task_kind_name(TaskKind kind) {
  return kind == TaskKind::Masa ? "masa" : "span";
}

TaskKind parse_task_kind(std::string_view name) {
  if (name == "masa") return TaskKind::Masa;
  if (name == "span") return TaskKind::Span;
  throw ValidationError("unknown task kind " + squote(name) +
                        " (expected masa or span)");
}

// ---------------------------------------------------------------------------
// AspectSchema

std::optional<std::size_t> AspectSchema::index_of(std::string_view aspect) const {
  for (std::size_t i = 0; i < aspects.size(); ++i) {
    if (aspects[i] == aspect) return i;
  }
  return std::nullopt;
}

std::vector<std::string> validate_schema(const AspectSchema& schema) {
  std::vector<std::string> out;
  if (schema.aspects.empty()) out.push_back("schema has no aspects");
  std::set<std::string> seen;
  for (const auto& a : schema.aspects) {
    if (a.empty()) {
      out.push_back("empty aspect name");
      continue;
    }
    if (!seen.insert(a).second) out.push_back("duplicate aspect " + squote(a));
    if (text::trim(a) != a) out.push_back("aspect " + squote(a) + " has surrounding whitespace");
    if (a.find_first_of(":|\n\"") != std::string::npos) {
      out.push_back("aspect " + squote(a) + " contains a reserved character");
    }
  }
  std::set<std::string> numeric;
  for (const auto& v : schema.numeric_labels) {
    if (v.empty()) out.push_back("empty numeric label");
    numeric.insert(v);
  }
  if (numeric.size() != schema.numeric_labels.size()) {
    out.push_back("numeric_label_map is not injective");
  }
  if (schema.placeholder_token.empty()) out.push_back("empty placeholder_token");
  return out;
}

AspectSchema schema_from_json(std::string_view json_text) {
  ojson j;
  try {
    j = ojson::parse(json_text);
  } catch (const ojson::parse_error& e) {
    throw ValidationError(std::string("malformed schema JSON: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("schema must be a JSON object");
  AspectSchema s;
  try {
    s.task_id = j.at("task_id").get<std::string>();
    s.aspects = j.at("aspects").get<std::vector<std::string>>();
    if (j.contains("numeric_label_map")) {
      const auto& m = j.at("numeric_label_map");
      for (SentimentLabel l : kAllLabels) {
        auto it = m.find(std::string(label_name(l)));
        if (it == m.end()) {
          throw ValidationError("numeric_label_map lacks " + squote(label_name(l)));
        }
        s.numeric_labels[label_index(l)] =
            it->is_string() ? it->get<std::string>() : it->dump();
      }
    }
    if (j.contains("placeholder_token")) {
      s.placeholder_token = j.at("placeholder_token").get<std::string>();
    }
  } catch (const ojson::exception& e) {
    throw ValidationError(std::string("invalid schema: ") + e.what());
  }
  auto problems = validate_schema(s);
  if (!problems.empty()) {
    throw ValidationError("invalid schema: " + text::join(problems, "; "));
  }
  return s;
}

AspectSchema load_schema(const std::filesystem::path& path) {
  return schema_from_json(text::read_file(path));
}

std::string schema_to_json(const AspectSchema& schema) {
  ojson j;
  j["task_id"] = schema.task_id;
  j["aspects"] = schema.aspects;
  ojson m = ojson::object();
  for (SentimentLabel l : kAllLabels) {
    m[std::string(label_name(l))] = schema.numeric_label(l);
  }
  j["numeric_label_map"] = m;
  j["placeholder_token"] = schema.placeholder_token;
  return j.dump(2);
}

AspectSchema builtin_schema(std::string_view name) {
  AspectSchema s;
  if (name == "d1") {
    s.task_id = "d1";
    s.aspects = {"food",     "beverage",       "price",
                 "hygiene", "staff_attitude", "parking_convenience"};
  } else if (name == "d2") {
    s.task_id = "d2";
    s.aspects = {"traffic_convenience", "queuing", "serving_speed",
                 "decoration", "noise"};
  } else if (name == "genia") {
    s.task_id = "genia";
    s.aspects = {"DNA", "RNA", "protein", "cell_line", "cell_type"};
    s.placeholder_token = "[]";
  } else {
    throw ValidationError("unknown built-in schema " + squote(name) +
                          " (known: d1, d2, genia)");
  }
  return s;
}

std::vector<std::string_view> builtin_schema_names() {
  return {"d1", "d2", "genia"};
}

// ---------------------------------------------------------------------------
// Records

std::optional<SentimentLabel> MasaRecord::label_of(std::string_view aspect) const {
  for (const auto& al : labels) {
    if (al.aspect == aspect) return al.label;
  }
  return std::nullopt;
}

const std::string* MasaRecord::rationale_of(std::string_view aspect) const {
  if (!rationales) return nullptr;
  for (const auto& r : *rationales) {
    if (r.aspect == aspect) return &r.text;
  }
  return nullptr;
}

const std::string& record_id(const TaskRecord& record) {
  return std::visit([](const auto& r) -> const std::string& { return r.id; },
                    record);
}

TaskKind record_kind(const TaskRecord& record) {
  return std::holds_alternative<MasaRecord>(record) ? TaskKind::Masa
                                                    : TaskKind::Span;
}

bool has_rationales(const TaskRecord& record) {
  const auto* m = std::get_if<MasaRecord>(&record);
  return m != nullptr && m->rationales.has_value();
}

namespace {

void validate_masa(const MasaRecord& r, const AspectSchema* schema,
                   std::vector<std::string>& out) {
  std::set<std::string> seen;
  for (const auto& al : r.labels) {
    if (!seen.insert(al.aspect).second) {
      out.push_back("duplicate aspect " + squote(al.aspect));
    }
    if (schema && !schema->index_of(al.aspect)) {
      out.push_back("unknown aspect " + squote(al.aspect));
    }
  }
  if (schema) {
    for (const auto& a : schema->aspects) {
      if (!seen.count(a)) out.push_back("missing aspect " + squote(a));
    }
  }
  if (r.rationales) {
    std::set<std::string> seen_r;
    for (const auto& rt : *r.rationales) {
      if (!seen_r.insert(rt.aspect).second) {
        out.push_back("duplicate rationale aspect " + squote(rt.aspect));
      }
      bool known = schema ? schema->index_of(rt.aspect).has_value()
                          : seen.count(rt.aspect) > 0;
      if (!known) out.push_back("unknown rationale aspect " + squote(rt.aspect));
    }
  }
}

void validate_span(const SpanRecord& r, const AspectSchema* schema,
                   std::vector<std::string>& out) {
  for (std::size_t i = 0; i < r.spans.size(); ++i) {
    const Span& s = r.spans[i];
    const std::string where = "span " + std::to_string(i) + ": ";
    if (s.mention.empty()) out.push_back(where + "empty mention");
    if (s.type.empty()) out.push_back(where + "empty type");
    if (schema && !s.type.empty() && !schema->index_of(s.type)) {
      out.push_back(where + "unknown span type " + squote(s.type));
    }
    if (s.start.has_value() != s.end.has_value()) {
      out.push_back(where + "offsets must be given as a start/end pair");
    } else if (s.start) {
      if (*s.start > *s.end || *s.end > r.text.size()) {
        out.push_back(where + "offsets out of range");
      } else if (std::string_view(r.text).substr(*s.start, *s.end - *s.start) !=
                 s.mention) {
        out.push_back(where + "text slice does not match mention " +
                      squote(s.mention));
      }
    }
  }
}

}  // namespace

std::vector<std::string> validate_record(const TaskRecord& record,
                                         const AspectSchema* schema) {
  std::vector<std::string> out;
  if (record_id(record).empty()) out.push_back("empty id");
  if (const auto* m = std::get_if<MasaRecord>(&record)) {
    validate_masa(*m, schema, out);
  } else {
    validate_span(std::get<SpanRecord>(record), schema, out);
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON-lines I/O

std::string record_to_json(const TaskRecord& record) {
  ojson j;
  if (const auto* m = std::get_if<MasaRecord>(&record)) {
    j["id"] = m->id;
    j["text"] = m->text;
    ojson labels = ojson::object();
    for (const auto& al : m->labels) labels[al.aspect] = label_name(al.label);
    j["labels"] = labels;
    if (m->rationales) {
      ojson rat = ojson::object();
      for (const auto& r : *m->rationales) rat[r.aspect] = r.text;
      j["rationales"] = rat;
    }
  } else {
    const auto& s = std::get<SpanRecord>(record);
    j["id"] = s.id;
    j["text"] = s.text;
    ojson spans = ojson::array();
    for (const auto& sp : s.spans) {
      ojson o;
      o["type"] = sp.type;
      o["mention"] = sp.mention;
      if (sp.start) o["start"] = *sp.start;
      if (sp.end) o["end"] = *sp.end;
      spans.push_back(o);
    }
    j["spans"] = spans;
  }
  return j.dump();
}

namespace {

const ojson& require(const ojson& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ValidationError(std::string("missing field '") + key + "'");
  return *it;
}

std::string require_string(const ojson& j, const char* key) {
  const ojson& v = require(j, key);
  if (!v.is_string()) throw ValidationError(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

TaskRecord record_from_ojson(const ojson& j, TaskKind kind) {
  if (!j.is_object()) throw ValidationError("record must be a JSON object");
  if (kind == TaskKind::Masa) {
    MasaRecord r;
    r.id = require_string(j, "id");
    r.text = require_string(j, "text");
    const ojson& labels = require(j, "labels");
    if (!labels.is_object()) throw ValidationError("field 'labels' must be an object");
    for (auto it = labels.begin(); it != labels.end(); ++it) {
      if (!it.value().is_string()) {
        throw ValidationError("label of " + squote(it.key()) + " must be a string");
      }
      auto l = label_from_name(it.value().get<std::string>());
      if (!l) {
        throw ValidationError("invalid label " + squote(it.value().get<std::string>()) +
                              " for aspect " + squote(it.key()));
      }
      r.labels.push_back({it.key(), *l});
    }
    if (auto it = j.find("rationales"); it != j.end() && !it->is_null()) {
      if (!it->is_object()) throw ValidationError("field 'rationales' must be an object");
      std::vector<AspectText> rat;
      for (auto rit = it->begin(); rit != it->end(); ++rit) {
        if (!rit.value().is_string()) {
          throw ValidationError("rationale of " + squote(rit.key()) + " must be a string");
        }
        rat.push_back({rit.key(), rit.value().get<std::string>()});
      }
      r.rationales = std::move(rat);
    }
    return r;
  }
  SpanRecord r;
  r.id = require_string(j, "id");
  r.text = require_string(j, "text");
  const ojson& spans = require(j, "spans");
  if (!spans.is_array()) throw ValidationError("field 'spans' must be an array");
  for (const auto& o : spans) {
    if (!o.is_object()) throw ValidationError("span must be an object");
    Span s;
    s.type = require_string(o, "type");
    s.mention = require_string(o, "mention");
    for (const char* key : {"start", "end"}) {
      auto it = o.find(key);
      if (it == o.end() || it->is_null()) continue;
      if (!it->is_number_unsigned()) {
        throw ValidationError(std::string("span '") + key + "' must be a non-negative integer");
      }
      (std::string_view(key) == "start" ? s.start : s.end) = it->get<std::size_t>();
    }
    r.spans.push_back(std::move(s));
  }
  return r;
}

}  // namespace

TaskRecord record_from_json(std::string_view json_line, TaskKind kind) {
  ojson j;
  try {
    j = ojson::parse(json_line);
  } catch (const ojson::parse_error& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what());
  }
  return record_from_ojson(j, kind);
}

std::vector<TaskRecord> parse_corpus(std::string_view jsonl, TaskKind kind,
                                     const AspectSchema* schema) {
  std::vector<TaskRecord> out;
  std::set<std::string> ids;
  std::size_t line_no = 0;
  for (std::string_view line : text::split_lines(jsonl)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    TaskRecord rec;
    try {
      rec = record_from_json(line, kind);
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
    }
    auto problems = validate_record(rec, schema);
    if (!problems.empty()) {
      throw ValidationError("record " + record_id(rec) + " " +
                            text::join(problems, "; ") + " (line " +
                            std::to_string(line_no) + ")");
    }
    if (!ids.insert(record_id(rec)).second) {
      throw ValidationError("duplicate record id " + squote(record_id(rec)) + " (line " +
                            std::to_string(line_no) + ")");
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<TaskRecord> load_corpus(const std::filesystem::path& path,
                                    TaskKind kind,
                                    const AspectSchema* schema) {
  return parse_corpus(text::read_file(path), kind, schema);
}

std::string corpus_to_jsonl(const std::vector<TaskRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += record_to_json(r);
    out += '\n';
  }
  return out;
}

void save_corpus(const std::vector<TaskRecord>& records,
                 const std::filesystem::path& path) {
  text::write_file(path, corpus_to_jsonl(records));
}

// ---------------------------------------------------------------------------
// Label distributions

const std::array<double, 4>* LabelDistribution::find(std::string_view aspect) const {
  for (const auto& [a, f] : per_aspect) {
    if (a == aspect) return &f;
  }
  return nullptr;
}

std::vector<std::string> validate_distribution(const LabelDistribution& dist) {
  std::vector<std::string> out;
  for (const auto& [aspect, f] : dist.per_aspect) {
    double sum = 0.0;
    for (double x : f) {
      if (!(x >= 0.0) || !std::isfinite(x)) {
        out.push_back("aspect " + squote(aspect) + " has a negative or non-finite fraction");
      }
      sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      out.push_back("fractions of aspect " + squote(aspect) + " sum to " +
                    std::to_string(sum) + ", not 1");
    }
  }
  return out;
}

LabelDistribution distribution_from_json(std::string_view json_text) {
  ojson j;
  try {
    j = ojson::parse(json_text);
  } catch (const ojson::parse_error& e) {
    throw ValidationError(std::string("malformed distribution JSON: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("distribution must be a JSON object");
  LabelDistribution d;
  for (auto it = j.begin(); it != j.end(); ++it) {
    std::array<double, 4> f{};
    for (SentimentLabel l : kAllLabels) {
      auto v = it.value().find(std::string(label_name(l)));
      if (v == it.value().end() || !v->is_number()) {
        throw ValidationError("distribution of " + squote(it.key()) + " lacks a numeric " +
                              squote(label_name(l)));
      }
      f[label_index(l)] = v->get<double>();
    }
    d.per_aspect.emplace_back(it.key(), f);
  }
  auto problems = validate_distribution(d);
  if (!problems.empty()) throw ValidationError(text::join(problems, "; "));
  return d;
}

LabelDistribution load_distribution(const std::filesystem::path& path) {
  return distribution_from_json(text::read_file(path));
}

namespace {

struct PercentRow {
  const char* aspect;
  std::array<double, 4> percent;
};

struct NamedTable {
  const char* name;
  std::vector<PercentRow> rows;
};

// Percentages (Pos, Neu, Neg, Unm) of the two review domains, per split.
const std::vector<NamedTable>& percent_tables() {
  static const std::vector<NamedTable> tables = {
      {"d1-train500",
       {{"food", {65.20, 15.00, 18.80, 1.00}},
        {"beverage", {22.20, 4.20, 8.20, 65.40}},
        {"price", {33.40, 13.00, 15.60, 38.00}},
        {"hygiene", {14.80, 1.20, 6.00, 78.00}},
        {"staff_attitude", {48.80, 3.60, 14.00, 33.60}},
        {"parking_convenience", {4.40, 0.60, 1.40, 93.60}}}},
      {"d1-train1000",
       {{"food", {66.60, 13.70, 18.30, 1.40}},
        {"beverage", {23.50, 3.60, 7.20, 65.70}},
        {"price", {35.60, 10.70, 15.80, 37.90}},
        {"hygiene", {17.10, 1.00, 5.50, 76.40}},
        {"staff_attitude", {47.90, 4.10, 13.60, 34.40}},
        {"parking_convenience", {4.80, 0.30, 1.90, 93.00}}}},
      {"d1-test",
       {{"food", {66.01, 12.23, 20.12, 1.64}},
        {"beverage", {21.50, 3.15, 6.29, 69.07}},
        {"price", {36.64, 10.24, 13.97, 39.15}},
        {"hygiene", {16.12, 0.82, 5.58, 77.48}},
        {"staff_attitude", {42.73, 3.46, 13.87, 39.94}},
        {"parking_convenience", {3.93, 0.34, 1.56, 94.18}}}},
      {"d2-train500",
       {{"traffic_convenience", {52.40, 13.20, 7.60, 26.80}},
        {"queuing", {18.80, 8.20, 11.20, 61.80}},
        {"serving_speed", {16.80, 3.60, 8.20, 71.40}},
        {"decoration", {46.00, 8.20, 4.20, 41.60}},
        {"noise", {1.00, 1.40, 2.80, 94.80}}}},
      {"d2-train1000",
       {{"traffic_convenience", {53.10, 13.20, 8.10, 25.60}},
        {"queuing", {17.90, 10.10, 11.00, 61.00}},
        {"serving_speed", {15.70, 3.80, 8.90, 71.60}},
        {"decoration", {48.50, 8.10, 4.30, 39.10}},
        {"noise", {1.40, 1.30, 3.40, 93.90}}}},
      {"d2-test",
       {{"traffic_convenience", {48.56, 12.84, 7.03, 31.57}},
        {"queuing", {14.67, 10.00, 10.44, 64.89}},
        {"serving_speed", {14.86, 3.15, 8.58, 73.41}},
        {"decoration", {43.10, 7.68, 5.28, 43.93}},
        {"noise", {2.10, 1.08, 3.36, 93.46}}}},
  };
  return tables;
}

}  // namespace

LabelDistribution builtin_distribution(std::string_view name) {
  for (const auto& t : percent_tables()) {
    if (name != t.name) continue;
    LabelDistribution d;
    for (const auto& row : t.rows) {
      // A few rows total 99.99 or 100.01; normalize by the row sum.
      double sum = 0.0;
      for (double p : row.percent) sum += p;
      std::array<double, 4> f{};
      for (std::size_t i = 0; i < 4; ++i) f[i] = row.percent[i] / sum;
      d.per_aspect.emplace_back(row.aspect, f);
    }
    return d;
  }
  std::string known;
  for (auto n : builtin_distribution_names()) {
    if (!known.empty()) known += ", ";
    known += n;
  }
  throw ValidationError("unknown built-in distribution " + squote(name) +
                        " (known: " + known + ")");
}

std::vector<std::string_view> builtin_distribution_names() {
  std::vector<std::string_view> out;
  for (const auto& t : percent_tables()) out.emplace_back(t.name);
  return out;
}

}  // namespace sde
