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

#include "sdekit/render.hpp"

#include "grammar.hpp"
#include "json.hpp"
#include "sdekit/errors.hpp"
#include "text_util.hpp"

namespace sde {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr std::string_view kSlotAspects = "{aspect_list}";
constexpr std::string_view kSlotFormat = "{format_clause}";
constexpr std::string_view kSlotUnmentioned = "{unmentioned_clause}";

constexpr std::array<std::string_view, 4> kFormatKeys = {"natural", "lines",
                                                         "lines_of_list", "json"};

std::string format_key(const DesignStrategy& s) {
  if (grammar::uses_list(s)) return "lines_of_list";
  switch (s.output_format) {
    case OutputFormat::Natural: return "natural";
    case OutputFormat::Lines: return "lines";
    case OutputFormat::Json: return "json";
  }
  return "?";
}

std::string unmentioned_key(UnmentionedHandling u) {
  return u == UnmentionedHandling::PU ? "pu" : "ou";
}

std::string label_key(LabelStyle l) { return l == LabelStyle::Txt ? "txt" : "num"; }

PromptTemplate masa_defaults() {
  PromptTemplate t;
  t.kind = TaskKind::Masa;
  t.instructions = {
      "Identify the sentiment the review expresses toward each of these aspects: "
      "{aspect_list}. {format_clause} {unmentioned_clause}",
      "Read the review and judge how the writer feels about every aspect in this "
      "list: {aspect_list}. {format_clause} {unmentioned_clause}",
      "Below is a customer review. For each of the aspects {aspect_list}, classify "
      "the opinion it contains. {format_clause} {unmentioned_clause}",
  };
  t.text_preamble = "Review: ";
  const std::map<std::string_view, std::string_view> shapes = {
      {"natural",
       "Answer in plain sentences such as \"The sentiment toward <aspect> is "
       "<label>.\", where <label> is one of {labels}."},
      {"lines",
       "Answer with one line per aspect in the form \"<aspect>: <label>\", where "
       "<label> is one of {labels}."},
      {"lines_of_list",
       "Answer with one line per aspect in the form \"<aspect>: [<label>]\", "
       "where <label> is one of {labels}."},
      {"json",
       "Answer with one JSON object per line, such as {\"aspect\": \"<aspect>\", "
       "\"sentiment\": \"<label>\"}, where <label> is one of {labels}."},
  };
  for (const auto& [fmt, clause] : shapes) {
    for (std::string_view style : {"txt", "num"}) {
      for (std::string_view unm : {"pu", "ou"}) {
        t.format_clauses[std::string(fmt) + "/" + std::string(style) + "/" +
                         std::string(unm)] = std::string(clause);
      }
    }
    t.unmentioned_clauses[std::string(fmt) + "/ou"] =
        "Leave out aspects the review does not mention, and answer \"none\" if it "
        "mentions none of them.";
  }
  t.unmentioned_clauses["natural/pu"] =
      "For an aspect the review does not mention, write \"<aspect> is not "
      "mentioned.\"";
  t.unmentioned_clauses["lines/pu"] =
      "Give aspects the review does not mention the label {placeholder}.";
  t.unmentioned_clauses["lines_of_list/pu"] =
      "Give aspects the review does not mention the value {placeholder}.";
  t.unmentioned_clauses["json/pu"] =
      "Give aspects the review does not mention the label {placeholder}.";
  t.reasoning_clauses["cot"] =
      "Before each label, describe the evidence for it in a few words.";
  t.reasoning_clauses["rcot"] =
      "After each label, describe the evidence for it in a few words.";
  return t;
}

PromptTemplate span_defaults() {
  PromptTemplate t;
  t.kind = TaskKind::Span;
  t.instructions = {
      "Extract all mentions of the following types from the text: {aspect_list}. "
      "{format_clause} {unmentioned_clause}",
      "Find every span in the text that belongs to one of these types: "
      "{aspect_list}. {format_clause} {unmentioned_clause}",
      "List the mentions of {aspect_list} that appear in the text. "
      "{format_clause} {unmentioned_clause}",
  };
  t.text_preamble = "Text: ";
  const std::map<std::string_view, std::string_view> shapes = {
      {"natural",
       "Answer in plain sentences such as \"The <type> mentions are \"<mention>\", "
       "\"<mention>\".\""},
      {"lines", "Answer with one line per type in the form \"<type>: <mention>; "
                "<mention>\"."},
      {"lines_of_list", "Answer with one line per type in the form \"<type>: "
                        "[<mention>, <mention>]\"."},
      {"json", "Answer with one JSON object per line, such as {\"type\": "
               "\"<type>\", \"mentions\": [\"<mention>\"]}."},
  };
  for (const auto& [fmt, clause] : shapes) {
    for (std::string_view style : {"txt", "num"}) {
      for (std::string_view unm : {"pu", "ou"}) {
        t.format_clauses[std::string(fmt) + "/" + std::string(style) + "/" +
                         std::string(unm)] = std::string(clause);
      }
    }
    t.unmentioned_clauses[std::string(fmt) + "/ou"] =
        "Leave out types with no mention, and answer \"none\" if there are none "
        "at all.";
  }
  t.unmentioned_clauses["natural/pu"] =
      "For a type with no mention, write \"<type> is not mentioned.\"";
  t.unmentioned_clauses["lines/pu"] = "For a type with no mention, write \"<type>: []\".";
  t.unmentioned_clauses["lines_of_list/pu"] =
      "For a type with no mention, write \"<type>: []\".";
  t.unmentioned_clauses["json/pu"] =
      "For a type with no mention, give an empty mentions list.";
  t.reasoning_clauses["cot"] =
      "Before each answer, describe the evidence for it in a few words.";
  t.reasoning_clauses["rcot"] =
      "After each answer, describe the evidence for it in a few words.";
  return t;
}

std::string record_prefix(const TaskRecord& record) {
  return "record " + record_id(record) + ": ";
}

void check_fits(const TaskRecord& record, const AspectSchema& schema,
                const DesignStrategy& strategy) {
  auto problems = validate_record(record, &schema);
  if (!problems.empty()) {
    throw ValidationError(record_prefix(record) + text::join(problems, "; "));
  }
  auto unfit = validate_strategy(strategy, has_rationales(record));
  if (!unfit.empty()) {
    throw ValidationError(record_prefix(record) + text::join(unfit, "; "));
  }
}

std::string clean_description(const MasaRecord& r, const std::string& aspect,
                              const DesignStrategy& s) {
  const std::string* raw = r.rationale_of(aspect);
  if (!raw) {
    throw ValidationError("record " + r.id + ": no rationale for mentioned aspect '" +
                          aspect + "', which " + std::string(option_label(s.reasoning)) +
                          " needs");
  }
  std::string desc = grammar::normalize_description(*raw);
  if (s.output_format == OutputFormat::Natural) {
    while (!desc.empty() && desc.back() == '.') desc.pop_back();
    desc = std::string(text::trim(desc));
    for (std::string_view bad : {", the sentiment toward ", ". the sentiment toward ",
                                 ". because ", " is not mentioned."}) {
      if (text::ifind(desc, bad) != std::string_view::npos) {
        throw ValidationError("record " + r.id + ": rationale of '" + aspect +
                              "' contains \"" + std::string(text::trim(bad)) +
                              "\", which the Natural format cannot delimit");
      }
    }
  }
  if (desc.empty()) {
    throw ValidationError("record " + r.id + ": rationale of '" + aspect + "' is empty");
  }
  return desc;
}

std::string masa_response(const MasaRecord& r, const AspectSchema& schema,
                          const DesignStrategy& s) {
  std::vector<grammar::MasaEntry> entries;
  entries.reserve(schema.aspects.size());
  for (const std::string& aspect : schema.aspects) {
    const SentimentLabel label = *r.label_of(aspect);
    const bool unmentioned = label == SentimentLabel::Unmentioned;
    if (unmentioned && s.unmentioned == UnmentionedHandling::OU) continue;
    grammar::MasaEntry e;
    e.aspect = aspect;
    e.value = grammar::label_surface(label, s, schema);
    if (unmentioned && s.output_format == OutputFormat::Natural) {
      e.not_mentioned_sentence = true;
    } else if (s.reasoning != Reasoning::NoCoT) {
      e.description = unmentioned ? std::string(grammar::kUnmentionedDescription)
                                  : clean_description(r, aspect, s);
    }
    entries.push_back(std::move(e));
  }
  return grammar::serialize_masa(entries, s);
}

void check_mention(const SpanRecord& r, const std::string& m,
                   const DesignStrategy& s) {
  auto reject = [&](std::string_view why) {
    throw ValidationError("record " + r.id + ": mention \"" + m + "\" " +
                          std::string(why));
  };
  if (text::trim(m) != m) reject("has surrounding whitespace");
  if (m.find('\n') != std::string::npos) reject("contains a line break");
  if (s.output_format != OutputFormat::Json &&
      (grammar::ascii_punctuation(m, true) != m || grammar::plain_spaces(m) != m ||
       m.find("  ") != std::string::npos)) {
    reject("contains spacing or punctuation the parser would normalize");
  }
  switch (s.output_format) {
    case OutputFormat::Natural:
      if (m.find('"') != std::string::npos) reject("contains a double quote");
      break;
    case OutputFormat::Lines:
      if (m.find_first_of("[]") != std::string::npos) reject("contains a bracket");
      if (m.find(grammar::uses_list(s) ? ", " : "; ") != std::string::npos) {
        reject("contains the list separator");
      }
      break;
    case OutputFormat::Json:
      break;
  }
}

std::string span_response(const SpanRecord& r, const AspectSchema& schema,
                          const DesignStrategy& s) {
  std::vector<grammar::SpanEntry> entries;
  for (const std::string& type : schema.aspects) {
    grammar::SpanEntry e;
    e.type = type;
    for (const Span& sp : r.spans) {
      if (sp.type != type) continue;
      check_mention(r, sp.mention, s);
      e.mentions.push_back(sp.mention);
    }
    if (e.mentions.empty() && s.unmentioned == UnmentionedHandling::OU) continue;
    entries.push_back(std::move(e));
  }
  return grammar::serialize_span(entries, s);
}

}  // namespace

PromptTemplate default_template(TaskKind kind) {
  return kind == TaskKind::Masa ? masa_defaults() : span_defaults();
}

std::vector<std::string> validate_template(const PromptTemplate& t) {
  std::vector<std::string> out;
  if (t.instructions.empty()) out.emplace_back("no instruction variants");
  for (std::size_t i = 0; i < t.instructions.size(); ++i) {
    for (std::string_view slot : {kSlotAspects, kSlotFormat, kSlotUnmentioned}) {
      if (t.instructions[i].find(slot) == std::string::npos) {
        out.push_back("instruction " + std::to_string(i) + " lacks slot " +
                      std::string(slot));
      }
    }
  }
  for (std::string_view fmt : kFormatKeys) {
    for (std::string_view style : {"txt", "num"}) {
      for (std::string_view unm : {"pu", "ou"}) {
        std::string key = std::string(fmt) + "/" + std::string(style) + "/" +
                          std::string(unm);
        if (!t.format_clauses.count(key)) out.push_back("missing format clause " + key);
      }
    }
    for (std::string_view unm : {"pu", "ou"}) {
      std::string key = std::string(fmt) + "/" + std::string(unm);
      if (!t.unmentioned_clauses.count(key)) {
        out.push_back("missing unmentioned clause " + key);
      }
    }
  }
  for (std::string_view r : {"cot", "rcot"}) {
    if (!t.reasoning_clauses.count(std::string(r))) {
      out.push_back("missing reasoning clause " + std::string(r));
    }
  }
  return out;
}

PromptTemplate template_from_json(std::string_view json_text) {
  ordered_json doc = ordered_json::parse(json_text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw ValidationError("template is not a JSON object");
  }
  TaskKind kind = parse_task_kind(doc.value("kind", std::string("masa")));
  PromptTemplate t = default_template(kind);
  try {
    if (doc.contains("instructions")) {
      t.instructions = doc["instructions"].get<std::vector<std::string>>();
    }
    if (doc.contains("text_preamble")) {
      t.text_preamble = doc["text_preamble"].get<std::string>();
    }
    auto merge = [&doc](const char* field, std::map<std::string, std::string>& into) {
      if (!doc.contains(field)) return;
      for (auto it = doc[field].begin(); it != doc[field].end(); ++it) {
        into[it.key()] = it.value().get<std::string>();
      }
    };
    merge("format_clauses", t.format_clauses);
    merge("unmentioned_clauses", t.unmentioned_clauses);
    merge("reasoning_clauses", t.reasoning_clauses);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("template field has the wrong type: ") + e.what());
  }
  if (auto problems = validate_template(t); !problems.empty()) {
    throw ValidationError("invalid template: " + text::join(problems, "; "));
  }
  return t;
}

PromptTemplate load_template(const std::filesystem::path& path) {
  return template_from_json(text::read_file(path));
}

std::string template_to_json(const PromptTemplate& t) {
  ordered_json doc;
  doc["kind"] = task_kind_name(t.kind);
  doc["instructions"] = t.instructions;
  doc["text_preamble"] = t.text_preamble;
  doc["format_clauses"] = t.format_clauses;
  doc["unmentioned_clauses"] = t.unmentioned_clauses;
  doc["reasoning_clauses"] = t.reasoning_clauses;
  return doc.dump(2);
}

std::string render_instruction(const AspectSchema& schema,
                               const DesignStrategy& s,
                               const PromptTemplate& t, std::size_t variant) {
  if (variant >= t.instructions.size()) {
    throw ValidationError("instruction variant " + std::to_string(variant) +
                          " out of range (template has " +
                          std::to_string(t.instructions.size()) + ")");
  }
  const std::string fmt = format_key(s);
  const std::string unm = unmentioned_key(s.unmentioned);
  auto fetch = [](const std::map<std::string, std::string>& table,
                  const std::string& key) -> const std::string& {
    auto it = table.find(key);
    if (it == table.end()) throw ValidationError("template lacks clause " + key);
    return it->second;
  };
  auto fill = [&](std::string clause) {
    clause = text::replace_all(std::move(clause), "{labels}",
                               grammar::label_vocabulary(s, schema));
    return text::replace_all(std::move(clause), "{placeholder}",
                             grammar::placeholder_surface(s, schema));
  };

  std::string out = t.instructions[variant];
  out = text::replace_all(std::move(out), kSlotAspects, text::join(schema.aspects, ", "));
  out = text::replace_all(std::move(out), kSlotFormat,
                          fill(fetch(t.format_clauses,
                                     fmt + "/" + label_key(s.label_style) + "/" + unm)));
  out = text::replace_all(std::move(out), kSlotUnmentioned,
                          fill(fetch(t.unmentioned_clauses, fmt + "/" + unm)));
  if (s.reasoning != Reasoning::NoCoT) {
    out += ' ';
    out += fetch(t.reasoning_clauses, s.reasoning == Reasoning::CoT ? "cot" : "rcot");
  }
  return out;
}

std::string render_prompt(const TaskRecord& record, const AspectSchema& schema,
                          const DesignStrategy& s, const PromptTemplate& t,
                          std::size_t variant) {
  if (record_kind(record) != t.kind) {
    throw ValidationError(record_prefix(record) + "template is for " +
                          std::string(task_kind_name(t.kind)) + " records");
  }
  const std::string& body = std::visit([](const auto& r) -> const std::string& { return r.text; },
                                       record);
  std::string text = t.text_preamble + body;
  if (s.placement == Placement::NoInst) {
    if (variant >= t.instructions.size()) {
      throw ValidationError("instruction variant " + std::to_string(variant) +
                            " out of range (template has " +
                            std::to_string(t.instructions.size()) + ")");
    }
    return text;
  }
  std::string inst = render_instruction(schema, s, t, variant);
  return s.placement == Placement::InstFirst ? inst + "\n\n" + text
                                             : text + "\n\n" + inst;
}

std::string render_response(const TaskRecord& record, const AspectSchema& schema,
                            const DesignStrategy& s) {
  check_fits(record, schema, s);
  if (const auto* m = std::get_if<MasaRecord>(&record)) return masa_response(*m, schema, s);
  return span_response(std::get<SpanRecord>(record), schema, s);
}

TrainingSample render_sample(const TaskRecord& record, const AspectSchema& schema,
                             const DesignStrategy& s, const PromptTemplate& t,
                             std::size_t variant) {
  TrainingSample out;
  out.id = record_id(record);
  out.prompt = render_prompt(record, schema, s, t, variant);
  out.response = render_response(record, schema, s);
  out.train_on_input = s.input_modeling == InputModeling::MI;
  out.strategy = s;
  out.instruction_variant = variant;
  return out;
}

std::vector<TrainingSample> render_corpus(const std::vector<TaskRecord>& records,
                                          const AspectSchema& schema,
                                          const DesignStrategy& s,
                                          const PromptTemplate& t,
                                          std::size_t variant) {
  std::vector<TrainingSample> out;
  out.reserve(records.size());
  for (const TaskRecord& r : records) out.push_back(render_sample(r, schema, s, t, variant));
  return out;
}

std::string render_eval_prompt(const TaskRecord& record, const AspectSchema& schema,
                               const DesignStrategy& s, const PromptTemplate& t,
                               const std::vector<TaskRecord>& exemplars,
                               std::size_t variant) {
  std::string out;
  for (const TaskRecord& ex : exemplars) {
    TrainingSample shot = render_sample(ex, schema, s, t, variant);
    out += shot.prompt;
    out += "\n\n";
    out += shot.response;
    out += "\n\n";
  }
  out += render_prompt(record, schema, s, t, variant);
  return out;
}

std::string sample_to_json(const TrainingSample& sample) {
  ordered_json obj;
  obj["id"] = sample.id;
  obj["prompt"] = sample.prompt;
  obj["response"] = sample.response;
  obj["train_on_input"] = sample.train_on_input;
  obj["strategy"] = to_string(sample.strategy);
  obj["instruction_variant"] = sample.instruction_variant;
  return obj.dump();
}

}  // namespace sde
