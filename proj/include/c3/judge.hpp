// Copyright 2026 The C3 Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Readability judgment of test inputs against their mined contexts.
//
// A value is readable when any tool prescribed by the context's judge method
// accepts it. STRING contexts use the LLM plus a regex or NER tagger; NUMBER
// contexts use a format regex, optionally with a procedural rule.

#pragma once

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "c3/analysis_clients.hpp"
#include "c3/code_model.hpp"
#include "c3/context_registry.hpp"
#include "c3/error.hpp"
#include "c3/miner.hpp"
#include "c3/number_format.hpp"

namespace c3 {

inline constexpr std::string_view kJudgedSchema = "c3.judged/1";

struct JudgeConfig {
  int bearable_length = 9;
  bool use_llm = true;
  NerBackend ner_backend = NerBackend::kGazetteer;
};

// Collaborators for judging. `llm` may be null when use_llm is false.
struct JudgeTools {
  const ContextRegistry* registry = nullptr;
  const NerClient* ner = nullptr;
  LlmClient* llm = nullptr;
  PromptBudget budget;
  std::string model_id = "gpt-4-turbo";
};

struct Judgment {
  BoundInput input;
  std::string context;
  std::map<std::string, bool> tool_verdicts;
  std::map<std::string, std::string> tool_errors;
  bool readable = false;
  std::optional<int> bearable_length;  // NUMBER judgments only
};

struct ValueVerdict {
  std::map<std::string, bool> tool_verdicts;
  std::map<std::string, std::string> tool_errors;
  bool readable = false;
};

// ---- single tools ------------------------------------------------------------

inline bool judge_with_regex(std::string_view value, const ReadabilityContext& context) {
  return context.matches(value);
}

inline bool judge_with_ner(std::string_view value, const ReadabilityContext& context, const NerClient& ner,
                           const ContextRegistry& registry) {
  for (const auto& a : ner.annotate(value)) {
    if (a.label == context.name) return true;
    if (context.generic) {
      const auto* tagged = registry.find(a.label);
      if (tagged && tagged->category == context.category) return true;
    }
  }
  return false;
}

inline bool judge_with_llm(std::string_view value, const ReadabilityContext& context, const ContextRegistry& registry,
                           const PromptBudget& budget, LlmClient& llm, const std::string& model_id) {
  BuiltPrompt prompt = build_judging_prompt(value, context, registry, budget);
  MineOptions options;
  options.model_id = model_id;
  return parse_judging_response(llm.complete(to_request(prompt, options)));
}

namespace detail {

struct LiteralShape {
  std::string sign;
  std::string prefix;  // 0b, 0x or empty
  std::string body;    // digits, underscores, '.', exponent
  bool hex = false;
};

inline LiteralShape literal_shape(std::string_view literal) {
  LiteralShape s;
  std::string t(text::trim(literal));
  if (!t.empty() && (t[0] == '-' || t[0] == '+')) {
    s.sign = t.substr(0, 1);
    t.erase(0, 1);
  }
  if (t.size() > 1 && t[0] == '0' && (t[1] == 'x' || t[1] == 'X' || t[1] == 'b' || t[1] == 'B')) {
    s.hex = t[1] == 'x' || t[1] == 'X';
    s.prefix = t.substr(0, 2);
    t.erase(0, 2);
  }
  if (!t.empty()) {
    char last = t.back();
    bool suffix = last == 'L' || last == 'l' || (!s.hex && (last == 'f' || last == 'F' || last == 'd' || last == 'D'));
    if (suffix) t.pop_back();
  }
  s.body = t;
  return s;
}

inline std::string mantissa_of(const LiteralShape& s) {
  if (s.hex) return s.body;
  auto e = s.body.find_first_of("eE");
  return e == std::string::npos ? s.body : s.body.substr(0, e);
}

inline bool longnumber_rule(const LiteralShape& s) {
  std::string m = mantissa_of(s);
  if (m.find('_') == std::string::npos) return false;
  int run = 0;
  for (char c : m) {
    bool digit = s.hex ? std::isxdigit(static_cast<unsigned char>(c)) != 0 : text::is_digit(c);
    run = digit ? run + 1 : 0;
    if (run > 3) return false;
  }
  return true;
}

inline bool fixedlength_rule(const LiteralShape& s) {
  std::string m = mantissa_of(s);
  std::string integer = m.substr(0, m.find('.'));
  auto groups = text::split(integer, '_');
  if (groups.size() < 2) return false;
  const std::size_t w = groups[1].size();
  if (w == 0 || groups[0].empty() || groups[0].size() > w) return false;
  for (std::size_t i = 1; i < groups.size(); ++i)
    if (groups[i].size() != w) return false;
  return true;
}

inline bool scientific_rule(const LiteralShape& s) {
  return !s.hex && s.body.find_first_of("eE") != std::string::npos;
}

}  // namespace detail

// Per-tool verdicts for a NUMBER literal. RULE holds when the literal is short
// enough to read or when the context's procedural format rule accepts it.
inline std::map<std::string, bool> number_verdicts(std::string_view literal, const ReadabilityContext& context,
                                                   int bearable_length = 9) {
  if (context.group != TypeGroup::kNumber) {
    throw Error(ErrorKind::kPrecondition, "context " + context.name + " is not a NUMBER context");
  }
  if (!is_number_literal(literal)) {
    throw Error(ErrorKind::kInvalidArgument, "malformed number literal '" + std::string(literal) + "'");
  }
  const auto shape = detail::literal_shape(literal);
  const std::string unsigned_literal = shape.prefix + shape.body;
  std::map<std::string, bool> out;
  if (context.judge_method == JudgeMethod::kRegex) {
    out["REGEX"] = context.matches(unsigned_literal);
    return out;
  }
  bool rule = digit_length(literal) < bearable_length;
  if (context.name == "LONGNUMBER") rule = rule || detail::longnumber_rule(shape);
  else if (context.name == "FIXEDLENGTH") rule = rule || detail::fixedlength_rule(shape);
  else if (context.name == "SCIENTIFIC") rule = rule || detail::scientific_rule(shape);
  out["RULE"] = rule;
  if (context.regex) out["REGEX"] = context.matches(unsigned_literal);
  return out;
}

inline bool judge_number(std::string_view literal, const ReadabilityContext& context, int bearable_length = 9) {
  for (const auto& [tool, ok] : number_verdicts(literal, context, bearable_length))
    if (ok) return true;
  return false;
}

// Judges a raw value (decoded string, or literal text for numbers). Tool
// failures are recorded and count as rejections.
inline ValueVerdict judge_value(std::string_view value, const ReadabilityContext& context, const JudgeConfig& config,
                                const JudgeTools& tools) {
  ValueVerdict v;
  auto run = [&](const std::string& tool, const std::function<bool()>& f) {
    try {
      v.tool_verdicts[tool] = f();
    } catch (const std::exception& e) {
      v.tool_verdicts[tool] = false;
      v.tool_errors[tool] = e.what();
    }
  };
  if (context.group == TypeGroup::kNumber) {
    try {
      v.tool_verdicts = number_verdicts(value, context, config.bearable_length);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kPrecondition) throw;
      v.tool_verdicts["RULE"] = false;
      v.tool_errors["RULE"] = e.what();
    }
  } else {
    if (!tools.registry) throw Error(ErrorKind::kPrecondition, "judging STRING values needs a registry");
    if (config.use_llm) {
      run("LLM", [&] {
        if (!tools.llm) throw Error(ErrorKind::kPrecondition, "no LLM client configured");
        return judge_with_llm(value, context, *tools.registry, tools.budget, *tools.llm, tools.model_id);
      });
    }
    if (context.judge_method == JudgeMethod::kLlmRegex) {
      run("REGEX", [&] { return judge_with_regex(value, context); });
    } else {
      run("NER", [&] {
        if (!tools.ner) throw Error(ErrorKind::kPrecondition, "no NER client configured");
        return judge_with_ner(value, context, *tools.ner, *tools.registry);
      });
    }
  }
  for (const auto& [tool, ok] : v.tool_verdicts) v.readable = v.readable || ok;
  return v;
}

inline Judgment judge_input(const BoundInput& input, const ReadabilityContext& context, const JudgeConfig& config,
                            const JudgeTools& tools) {
  if (input.value_kind != context.group) {
    throw Error(ErrorKind::kPrecondition, "input of " + input.test_id + " has a " +
                                              std::string(to_string(input.value_kind)) + " value but context " +
                                              context.name + " is " + std::string(to_string(context.group)));
  }
  ValueVerdict v = judge_value(input.value(), context, config, tools);
  Judgment j;
  j.input = input;
  j.context = context.name;
  j.tool_verdicts = std::move(v.tool_verdicts);
  j.tool_errors = std::move(v.tool_errors);
  j.readable = v.readable;
  if (context.group == TypeGroup::kNumber) j.bearable_length = config.bearable_length;
  return j;
}

// ---- suites ------------------------------------------------------------------

struct SiteCoverage {
  ParameterSite site;
  std::string project = "default";
  std::string context;
  bool covered = false;   // some test binds a literal to the site
  bool readable = false;  // some such literal is readable
};

struct SuiteJudgment {
  std::vector<Judgment> judgments;
  std::vector<SiteCoverage> sites;  // CONTEXT-mined sites, sorted by key
  std::vector<std::string> diagnostics;
};

inline SuiteJudgment judge_suite(const std::vector<SourceUnit>& tests, const std::vector<MiningResult>& mined,
                                 const JudgeConfig& config, const JudgeTools& tools) {
  if (!tools.registry) throw Error(ErrorKind::kPrecondition, "judge_suite needs a registry");
  SuiteJudgment out;
  std::vector<ParameterSite> sites;
  std::map<SiteKey, std::size_t> index;
  for (const auto& m : mined) {
    if (m.outcome.is_misc()) continue;
    index[m.site.key()] = out.sites.size();
    out.sites.push_back({m.site, m.project, *m.outcome.context, false, false});
    sites.push_back(m.site);
  }
  for (const auto& test : tests) {
    std::vector<BoundInput> inputs;
    try {
      inputs = extract_test_inputs(test, sites);
    } catch (const Error& e) {
      out.diagnostics.push_back("skipped " + test.path + ": " + e.what());
      continue;
    }
    for (const auto& input : inputs) {
      auto& cov = out.sites[index.at(input.site)];
      Judgment j = judge_input(input, tools.registry->lookup(cov.context), config, tools);
      for (const auto& [tool, err] : j.tool_errors)
        out.diagnostics.push_back(input.test_id + " " + tool + ": " + err);
      cov.covered = true;
      cov.readable = cov.readable || j.readable;
      out.judgments.push_back(std::move(j));
    }
  }
  std::sort(out.sites.begin(), out.sites.end(),
            [](const SiteCoverage& a, const SiteCoverage& b) { return a.site.key() < b.site.key(); });
  return out;
}

// ---- serialization -----------------------------------------------------------

inline nlohmann::json to_json(const Judgment& j) {
  nlohmann::json out{{"input", to_json(j.input)},
                     {"context", j.context},
                     {"tool_verdicts", j.tool_verdicts},
                     {"readable", j.readable},
                     {"bearable_length", j.bearable_length ? nlohmann::json(*j.bearable_length) : nlohmann::json()}};
  if (!j.tool_errors.empty()) out["tool_errors"] = j.tool_errors;
  return out;
}

inline Judgment judgment_from_json(const nlohmann::json& j) {
  try {
    Judgment out;
    out.input = input_from_json(j.at("input"));
    out.context = j.at("context").get<std::string>();
    out.tool_verdicts = j.at("tool_verdicts").get<std::map<std::string, bool>>();
    out.readable = j.at("readable").get<bool>();
    if (j.contains("bearable_length") && !j["bearable_length"].is_null())
      out.bearable_length = j["bearable_length"].get<int>();
    if (j.contains("tool_errors")) out.tool_errors = j["tool_errors"].get<std::map<std::string, std::string>>();
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("malformed judgment: ") + e.what());
  }
}

inline nlohmann::json to_json(const SiteCoverage& s) {
  return {{"site", to_json(s.site)}, {"project", s.project}, {"context", s.context},
          {"covered", s.covered},    {"readable", s.readable}};
}

inline SiteCoverage site_coverage_from_json(const nlohmann::json& j) {
  try {
    return {site_from_json(j.at("site")), j.value("project", std::string("default")),
            j.at("context").get<std::string>(), j.at("covered").get<bool>(), j.at("readable").get<bool>()};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("malformed site coverage: ") + e.what());
  }
}

inline nlohmann::json to_json(const SuiteJudgment& s) {
  nlohmann::json j{{"schema", kJudgedSchema}};
  j["judgments"] = nlohmann::json::array();
  for (const auto& x : s.judgments) j["judgments"].push_back(to_json(x));
  j["sites"] = nlohmann::json::array();
  for (const auto& x : s.sites) j["sites"].push_back(to_json(x));
  j["diagnostics"] = s.diagnostics;
  return j;
}

inline SuiteJudgment suite_judgment_from_json(const nlohmann::json& j) {
  if (j.value("schema", std::string()) != kJudgedSchema) {
    throw Error(ErrorKind::kParse, "unsupported judged document schema '" + j.value("schema", std::string()) + "'");
  }
  SuiteJudgment s;
  for (const auto& x : j.value("judgments", nlohmann::json::array())) s.judgments.push_back(judgment_from_json(x));
  for (const auto& x : j.value("sites", nlohmann::json::array())) s.sites.push_back(site_coverage_from_json(x));
  s.diagnostics = j.value("diagnostics", std::vector<std::string>{});
  return s;
}

}  // namespace c3
