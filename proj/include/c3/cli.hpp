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

// The `c3` command line: mine -> judge -> report, plus synthesize, extract
// and add-context. Data goes to files under --out (and reports to standard
// output); diagnostics go to the error stream.

#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "c3/analysis_clients.hpp"
#include "c3/code_model.hpp"
#include "c3/context_registry.hpp"
#include "c3/error.hpp"
#include "c3/fitness_search.hpp"
#include "c3/judge.hpp"
#include "c3/metrics_report.hpp"
#include "c3/miner.hpp"

namespace c3::cli {

namespace fs = std::filesystem;

inline constexpr std::string_view kSiteSchema = "c3.site/1";
inline constexpr std::string_view kJudgmentSchema = "c3.judgment/1";

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,  // network, I/O, budget or other runtime failure
  kExitUsage = 2,    // bad flags, unknown names, invalid definitions
  kExitInput = 3,    // unparsable input files
};

inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument:
    case ErrorKind::kNotFound:
    case ErrorKind::kDuplicate:
    case ErrorKind::kPrecondition:
      return kExitUsage;
    case ErrorKind::kParse:
      return kExitInput;
    default:
      return kExitFailure;
  }
}

struct RunConfig {
  std::optional<fs::path> registry_path;
  std::vector<fs::path> source_paths;
  std::vector<fs::path> test_paths;
  PromptBudget budget;
  JudgeConfig judge;
  SearchConfig search;
  std::optional<fs::path> cache_dir;
  fs::path out_dir = ".";
  std::string model_id = "gpt-4-turbo";
  std::string project = "default";
  std::string ner_endpoint;
  int votes = 1;
  int workers = 4;

  ContextRegistry registry() const {
    return registry_path ? load_registry_file(*registry_path) : builtin_registry();
  }

  LlmClient llm() const {
    LlmConfig c = LlmConfig::from_env();
    c.cache_dir = cache_dir ? *cache_dir : out_dir / "llm_cache";
    c.max_in_flight = std::max(1, workers);
    return LlmClient(c);
  }
};

// ---- file helpers ------------------------------------------------------------

// Every *.java file under `paths` (files or directories), sorted.
inline std::vector<fs::path> collect_java(const std::vector<fs::path>& paths) {
  std::vector<fs::path> out;
  for (const auto& p : paths) {
    std::error_code ec;
    if (fs::is_regular_file(p, ec)) {
      out.push_back(p);
    } else if (fs::is_directory(p, ec)) {
      for (const auto& e : fs::recursive_directory_iterator(p))
        if (e.is_regular_file() && e.path().extension() == ".java") out.push_back(e.path());
    } else {
      throw Error(ErrorKind::kNotFound, "no such file or directory: " + p.string());
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline void write_text(const fs::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
}

inline void write_jsonl(const fs::path& path, const std::vector<nlohmann::json>& records) {
  std::string text;
  for (const auto& r : records) text += r.dump() + "\n";
  write_text(path, text);
}

// Parsed JSON lines; errors carry path:line.
inline std::vector<nlohmann::json> read_jsonl(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::vector<nlohmann::json> out;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (text::trim(line).empty()) continue;
    try {
      out.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(path.string(), n, 1, std::string("malformed JSON line: ") + e.what());
    }
  }
  return out;
}

template <typename T, typename F>
std::vector<T> decode_jsonl(const fs::path& path, F&& decode) {
  std::vector<T> out;
  int n = 0;
  for (const auto& j : read_jsonl(path)) {
    ++n;
    try {
      out.push_back(decode(j));
    } catch (const Error& e) {
      throw Error(e.kind(), path.string() + ": record " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

inline std::vector<MiningResult> read_mined(const fs::path& path, const ContextRegistry& registry) {
  return decode_jsonl<MiningResult>(path, [&](const nlohmann::json& j) { return mining_result_from_json(j, registry); });
}

inline std::vector<Judgment> read_judgments(const fs::path& path) {
  return decode_jsonl<Judgment>(path, [](const nlohmann::json& j) {
    if (j.value("schema", std::string()) != kJudgmentSchema) {
      throw Error(ErrorKind::kParse, "unsupported judgment schema '" + j.value("schema", std::string()) + "'");
    }
    return judgment_from_json(j);
  });
}

inline nlohmann::json judgment_record(const Judgment& j) {
  nlohmann::json r = to_json(j);
  r["schema"] = kJudgmentSchema;
  return r;
}

inline std::vector<SourceUnit> read_units(const std::vector<fs::path>& paths, UnitKind kind) {
  std::vector<SourceUnit> out;
  for (const auto& f : collect_java(paths)) out.push_back(read_source_unit(f, kind));
  return out;
}

// ---- commands ----------------------------------------------------------------

inline std::vector<ParameterSite> extract_all(const std::vector<SourceUnit>& units) {
  std::vector<ParameterSite> sites;
  for (const auto& u : units) {
    auto s = extract_parameters(u);
    sites.insert(sites.end(), s.begin(), s.end());
  }
  return sites;
}

inline int cmd_extract(const RunConfig& config, std::ostream& out) {
  config.registry();
  auto sites = extract_all(read_units(config.source_paths, UnitKind::kCodeUnderTest));
  std::vector<nlohmann::json> records;
  for (const auto& s : sites) {
    nlohmann::json j = to_json(s);
    j["schema"] = kSiteSchema;
    records.push_back(j);
  }
  fs::path dest = config.out_dir / "sites.jsonl";
  write_jsonl(dest, records);
  out << "extracted " << sites.size() << " parameter sites -> " << dest.string() << "\n";
  return kExitOk;
}

inline std::vector<MiningResult> cmd_mine(const RunConfig& config, std::ostream& out) {
  if (!config.judge.use_llm) {
    throw Error(ErrorKind::kPrecondition, "mining asks the LLM for each parameter; it cannot run with --no-llm");
  }
  ContextRegistry registry = config.registry();
  auto sites = extract_all(read_units(config.source_paths, UnitKind::kCodeUnderTest));
  std::vector<MiningResult> mined;
  if (!sites.empty()) {
    LlmClient llm = config.llm();
    MineOptions options;
    options.model_id = config.model_id;
    options.votes = config.votes;
    options.project = config.project;
    mined = mine_all(sites, registry, config.budget, llm, options, config.workers);
  }
  std::vector<nlohmann::json> records;
  std::size_t contexted = 0;
  for (const auto& m : mined) {
    records.push_back(to_json(m));
    contexted += m.outcome.is_misc() ? 0 : 1;
  }
  fs::path dest = config.out_dir / "mined.jsonl";
  write_jsonl(dest, records);
  out << "mined " << mined.size() << " parameter sites (" << contexted << " with a context) -> " << dest.string()
      << "\n";
  return mined;
}

inline SuiteJudgment cmd_judge(const RunConfig& config, const fs::path& mined_path, std::ostream& out,
                               std::ostream& err) {
  ContextRegistry registry = config.registry();
  auto mined = read_mined(mined_path, registry);
  auto tests = read_units(config.test_paths, UnitKind::kTest);
  NerClient ner(registry, config.judge.ner_backend, config.ner_endpoint);
  std::optional<LlmClient> llm;
  if (config.judge.use_llm) llm.emplace(config.llm().config());
  JudgeTools tools;
  tools.registry = &registry;
  tools.ner = &ner;
  tools.llm = llm ? &*llm : nullptr;
  tools.budget = config.budget;
  tools.model_id = config.model_id;
  SuiteJudgment suite = judge_suite(tests, mined, config.judge, tools);
  for (const auto& d : suite.diagnostics) err << "c3 judge: " << d << "\n";

  std::vector<nlohmann::json> records;
  for (const auto& j : suite.judgments) records.push_back(judgment_record(j));
  write_jsonl(config.out_dir / "judgments.jsonl", records);
  Report report;
  report.readability = aggregate_readability(suite.judgments, mined);
  write_text(config.out_dir / "report.json", render_report(report, ReportFormat::kJson));
  out << render_report(report, ReportFormat::kMarkdown);
  return suite;
}

inline std::vector<SynthesisResult> cmd_synthesize(const RunConfig& config, const fs::path& mined_path,
                                                   std::ostream& out) {
  ContextRegistry registry = config.registry();
  auto mined = read_mined(mined_path, registry);
  FitnessOracle oracle(registry);
  std::vector<SynthesisResult> results;
  Report report;
  for (const auto& goals : goals_from_mined(mined, registry)) {
    results.push_back(synthesize_inputs(goals, oracle, config.search));
    report.coverage.push_back(goal_coverage(results.back()));
  }
  std::vector<nlohmann::json> records;
  for (const auto& r : results) records.push_back(to_json(r));
  write_jsonl(config.out_dir / "synthesized.jsonl", records);

  std::size_t rewrites = 0;
  for (const auto& unit : read_units(config.test_paths, UnitKind::kTest)) {
    ReformattedUnit re = reformat_candidate_numbers(unit, mined, registry);
    rewrites += re.rewrites.size();
    write_text(config.out_dir / "reformatted" / fs::path(unit.path).filename(), re.unit.text);
  }
  if (results.empty()) out << "no STRING contexts to search\n";
  if (!report.coverage.empty()) {
    write_text(config.out_dir / "coverage.json", render_report(report, ReportFormat::kJson));
    out << render_report(report, ReportFormat::kMarkdown);
  }
  if (!config.test_paths.empty()) out << "rewrote " << rewrites << " number literals\n";
  return results;
}

struct ReportInputs {
  std::optional<fs::path> mined;
  std::optional<fs::path> judgments;
  std::optional<fs::path> synthesized;
  std::vector<std::uint64_t> confusion;  // tp, fp, tn, fn
  std::string format = "markdown";
};

inline Report build_report(const RunConfig& config, const ReportInputs& in) {
  Report report;
  if (!in.confusion.empty()) {
    if (in.confusion.size() != 4) throw Error(ErrorKind::kInvalidArgument, "--confusion takes TP,FP,TN,FN");
    report.confusion = ConfusionCounts{in.confusion[0], in.confusion[1], in.confusion[2], in.confusion[3]};
  }
  if (in.judgments) {
    if (!in.mined) throw Error(ErrorKind::kInvalidArgument, "--judgments needs --mined");
    ContextRegistry registry = config.registry();
    report.readability = aggregate_readability(read_judgments(*in.judgments), read_mined(*in.mined, registry));
  }
  if (in.synthesized) {
    for (const auto& j : read_jsonl(*in.synthesized)) {
      if (j.value("schema", std::string()) != kSynthesizedSchema) {
        throw Error(ErrorKind::kParse, in.synthesized->string() + ": unsupported synthesis schema");
      }
      GoalCoverage g{j.at("class_id").get<std::string>(), j.at("method_sig").get<std::string>(), {}, {}};
      for (const auto& goal : j.at("goals")) {
        Ratio& r = goal.at("goal").at("kind") == "PARAM" ? g.c3 : g.c3invo;
        r.den += 1;
        r.num += goal.at("covered").get<bool>() ? 1 : 0;
      }
      report.coverage.push_back(g);
    }
  }
  return report;
}

inline nlohmann::json context_definitions(const fs::path& path) {
  nlohmann::json doc = read_json_file(path);
  if (doc.is_object() && doc.contains("contexts")) return doc["contexts"];
  if (doc.is_array()) return doc;
  return nlohmann::json::array({doc});
}

// Merges `definitions` into the registry and returns the merged document.
inline nlohmann::json cmd_add_context(const RunConfig& config, const nlohmann::json& definitions) {
  nlohmann::json doc = to_document(config.registry());
  for (const auto& d : definitions) doc["contexts"].push_back(d);
  return to_document(load_registry(doc));
}

// ---- argument parsing --------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"c3: mine, judge and synthesize readable test inputs", "c3"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig config;
  std::string registry;
  std::string cache_dir;
  std::string out_dir = ".";
  bool no_llm = false;
  std::string ner = "gazetteer";
  std::uint64_t rng_seed = 0;

  app.add_option("--registry", registry, "Registry JSON document (default: built-in contexts)");
  app.add_option("--cache-dir", cache_dir, "LLM response cache directory (default: OUT/llm_cache)");
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  app.add_flag("--no-llm", no_llm, "Judge with offline tools only");
  app.add_option("--ner", ner, "NER backend: gazetteer or server")->capture_default_str();
  app.add_option("--ner-endpoint", config.ner_endpoint, "NER server URL (default: $C3_NER_ENDPOINT)");
  app.add_option("--bearable-length", config.judge.bearable_length, "Digit length below which numbers are readable")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--max-token", config.budget.max_token, "Prompt token budget")->capture_default_str();
  app.add_option("--remain", config.budget.remain, "Tokens reserved for the response")->capture_default_str();
  app.add_option("--tokenizer", config.budget.tokenizer_id, "Token estimator id")->capture_default_str();
  app.add_option("--model", config.model_id, "Chat model id")->capture_default_str();
  app.add_option("--rng-seed", rng_seed, "Search RNG seed")->capture_default_str();
  app.add_option("--workers", config.workers, "Concurrent LLM requests")->capture_default_str()->check(CLI::PositiveNumber);

  std::vector<std::string> src;
  std::vector<std::string> tests;
  std::string mined_path;

  auto* extract = app.add_subcommand("extract", "List primitive-type parameter sites of the code under test");
  extract->add_option("--src", src, "Java files or directories of the code under test")->required();

  auto* mine = app.add_subcommand("mine", "Mine a readability context for every parameter site");
  mine->add_option("--src", src, "Java files or directories of the code under test")->required();
  mine->add_option("--project", config.project, "Project label for reports")->capture_default_str();
  mine->add_option("--votes", config.votes, "Sampled answers per site (majority vote)")->check(CLI::PositiveNumber);

  auto* judge = app.add_subcommand("judge", "Judge test inputs against mined contexts");
  judge->add_option("--mined", mined_path, "Mined records (default: OUT/mined.jsonl)");
  judge->add_option("--tests", tests, "Java test files or directories")->required();

  auto* synth = app.add_subcommand("synthesize", "Search readable string inputs and reformat number literals");
  synth->add_option("--mined", mined_path, "Mined records (default: OUT/mined.jsonl)");
  synth->add_option("--tests", tests, "Tests whose number literals are reformatted");
  synth->add_option("--population", config.search.population, "GA population")->capture_default_str();
  synth->add_option("--max-generations", config.search.max_generations, "GA generation cap")->capture_default_str();
  synth->add_option("--seed-injection", config.search.seed_injection_prob, "Seed injection probability")
      ->capture_default_str();

  ReportInputs report_in;
  std::string judgments_path;
  std::string synthesized_path;
  std::string confusion;
  auto* report = app.add_subcommand("report", "Render accuracy, readability and goal-coverage tables");
  report->add_option("--mined", mined_path, "Mined records");
  report->add_option("--judgments", judgments_path, "Judgment records");
  report->add_option("--synthesized", synthesized_path, "Synthesis records");
  report->add_option("--confusion", confusion, "Mining confusion counts TP,FP,TN,FN");
  report->add_option("--format", report_in.format, "json, csv or markdown")->capture_default_str();

  std::string definition;
  nlohmann::json inline_context = nlohmann::json::object();
  std::string name, group = "STRING", category, judge_method;
  std::vector<std::string> examples;
  std::string regex;
  bool generic = false;
  auto* add = app.add_subcommand("add-context", "Add user-defined contexts to a registry document");
  add->add_option("--definition", definition, "JSON file with a context, a list, or {\"contexts\": [...]}");
  add->add_option("--name", name, "Context name (uppercase)");
  add->add_option("--group", group, "STRING or NUMBER")->capture_default_str();
  add->add_option("--category", category, "Category (default: User Defined)");
  add->add_option("--judge-method", judge_method, "LLM_REGEX, LLM_NER, REGEX or RULE_REGEX");
  add->add_option("--example", examples, "Example value (repeatable)");
  add->add_option("--regex", regex, "Anchored validation pattern");
  add->add_flag("--generic", generic, "Accept any label of the context's category");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (!registry.empty()) config.registry_path = registry;
    if (!cache_dir.empty()) config.cache_dir = cache_dir;
    config.out_dir = out_dir;
    config.judge.use_llm = !no_llm;
    config.judge.ner_backend = parse_ner_backend(ner);
    config.search.rng_seed = rng_seed;
    config.budget.validate();
    for (const auto& s : src) config.source_paths.emplace_back(s);
    for (const auto& t : tests) config.test_paths.emplace_back(t);
    fs::path mined = mined_path.empty() ? config.out_dir / "mined.jsonl" : fs::path(mined_path);

    if (*extract) return cmd_extract(config, out);
    if (*mine) {
      cmd_mine(config, out);
      return kExitOk;
    }
    if (*judge) {
      cmd_judge(config, mined, out, err);
      return kExitOk;
    }
    if (*synth) {
      config.search.validate();
      cmd_synthesize(config, mined, out);
      return kExitOk;
    }
    if (*report) {
      if (!mined_path.empty()) report_in.mined = mined_path;
      if (!judgments_path.empty()) report_in.judgments = judgments_path;
      if (!synthesized_path.empty()) report_in.synthesized = synthesized_path;
      if (!confusion.empty()) {
        for (const auto& part : text::split(confusion, ',')) {
          try {
            report_in.confusion.push_back(std::stoull(std::string(text::trim(part))));
          } catch (const std::exception&) {
            throw Error(ErrorKind::kInvalidArgument, "--confusion takes four counts TP,FP,TN,FN");
          }
        }
      }
      out << render_report(build_report(config, report_in), parse_report_format(report_in.format));
      return kExitOk;
    }
    if (*add) {
      nlohmann::json defs = nlohmann::json::array();
      if (!definition.empty()) defs = context_definitions(definition);
      if (!name.empty()) {
        nlohmann::json c{{"name", name}, {"group", group}, {"examples", examples}};
        if (!category.empty()) c["category"] = category;
        if (!judge_method.empty()) c["judge_method"] = judge_method;
        if (!regex.empty()) c["regex"] = regex;
        if (generic) c["generic"] = true;
        defs.push_back(c);
      }
      if (defs.empty()) throw Error(ErrorKind::kInvalidArgument, "add-context needs --definition or --name");
      nlohmann::json merged = cmd_add_context(config, defs);
      fs::path dest = config.registry_path ? *config.registry_path : config.out_dir / "registry.json";
      write_text(dest, merged.dump(2) + "\n");
      out << "registry with " << merged["contexts"].size() << " contexts -> " << dest.string() << "\n";
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "c3: error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "c3: error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace c3::cli
