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

// Token-budgeted few-shot prompts and context mining for parameter sites.

#pragma once

#include <algorithm>
#include <atomic>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "c3/analysis_clients.hpp"
#include "c3/code_model.hpp"
#include "c3/context_registry.hpp"
#include "c3/error.hpp"
#include "c3/text.hpp"

namespace c3 {

struct PromptBudget {
  int max_token = 4096;
  int remain = 20;
  std::string tokenizer_id = "bytes4";

  void validate() const {
    if (max_token <= 0 || remain <= 0 || remain >= max_token) {
      throw Error(ErrorKind::kInvalidArgument, "prompt budget needs 0 < remain < max_token (got max_token=" +
                                                   std::to_string(max_token) + ", remain=" + std::to_string(remain) + ")");
    }
  }
  int limit() const { return max_token - remain; }
};

using TokenCounter = std::function<int(std::string_view)>;

namespace detail {

inline std::map<std::string, TokenCounter, std::less<>>& token_counters() {
  static std::map<std::string, TokenCounter, std::less<>> counters = {
      {"bytes4", [](std::string_view s) { return static_cast<int>((s.size() + 3) / 4); }},
      {"words", [](std::string_view s) {
         int n = 0;
         bool in_word = false;
         for (char c : s) {
           bool space = text::is_space(c);
           if (!space && !in_word) ++n;
           in_word = !space;
         }
         return n;
       }}};
  return counters;
}

}  // namespace detail

// Registers an exact tokenizer under `id`; call before any concurrent use.
inline void register_token_counter(const std::string& id, TokenCounter counter) {
  detail::token_counters()[id] = std::move(counter);
}

inline int estimate_tokens(std::string_view text, const PromptBudget& budget) {
  const auto& counters = detail::token_counters();
  auto it = counters.find(budget.tokenizer_id);
  if (it == counters.end()) {
    throw Error(ErrorKind::kInvalidArgument, "unknown tokenizer_id '" + budget.tokenizer_id + "'");
  }
  return it->second(text);
}

inline int estimate_tokens(const std::vector<ChatMessage>& messages, const PromptBudget& budget) {
  int total = 0;
  for (const auto& m : messages) total += estimate_tokens(m.content, budget);
  return total;
}

struct BuiltPrompt {
  std::vector<ChatMessage> messages;
  int shots = 0;
  bool truncated = false;
  int estimated_tokens = 0;
};

inline const std::string& mining_system_message() {
  static const std::string s =
      "You are an expert in software testing and program comprehension. You will be given a parameter of a "
      "method under test together with the method's source code and comments, followed by a list of "
      "readability contexts. Choose the single context that values of the parameter should match so that a "
      "unit test using them is easy to read. Reply with the context name only. Reply MISC when no context "
      "matches this parameter.";
  return s;
}

inline const std::string& judging_system_message() {
  static const std::string s =
      "You are an expert in software testing. You will be given a readability context with examples and a "
      "value used as a unit test input. Decide whether a programmer would read the value as an instance of "
      "the context. Reply yes or no only.";
  return s;
}

namespace detail {

inline const std::string kOperatorLead = "The operators involved by this parameter are [";

inline std::string options_block(const ContextRegistry& registry, TypeGroup group) {
  std::string out = "Options:\n";
  for (const auto* c : registry.contexts_in(group)) {
    out += "- " + c->name;
    if (!c->examples.empty()) {
      out += " (e.g. " + (group == TypeGroup::kString ? text::quoted(c->examples.front()) : c->examples.front()) + ")";
    }
    out += "\n";
  }
  out += "- MISC (no context matches this parameter)";
  return out;
}

inline std::string operator_sentence(const std::vector<std::string>& ops) {
  return kOperatorLead + text::join(ops, ", ") + "]";
}

// Puts the option list between a question body and its trailing operator
// sentence, so shots and target questions share one layout.
inline std::string with_options(const std::string& question, const std::string& options) {
  auto pos = question.rfind(kOperatorLead);
  std::string body = pos == std::string::npos ? question : question.substr(0, pos);
  std::string tail = pos == std::string::npos ? "" : question.substr(pos);
  while (!body.empty() && text::is_space(body.back())) body.pop_back();
  std::string out = body + "\n" + options;
  if (!tail.empty()) out += "\n" + std::string(text::trim(tail));
  return out;
}

inline std::string mining_question(const ParameterSite& site, const std::string& source, const std::string& options) {
  std::string q = "Parameter name: " + site.param_name + "\nMethod name: " + site.method_name +
                  "\nSource code:\n" + source + "\nWhich context should the values of parameter " +
                  text::quoted(site.param_name) + " match?\n" + options;
  if (site.group() == TypeGroup::kNumber && !site.operators.empty()) q += "\n" + operator_sentence(site.operators);
  return q;
}

inline std::string truncated_source(const std::vector<std::string>& lines, std::size_t keep) {
  std::vector<std::string> kept(lines.begin(), lines.begin() + static_cast<std::ptrdiff_t>(keep));
  kept.push_back("... (truncated)");
  return text::join(kept, "\n");
}

struct Shot {
  std::string question;
  std::string answer;
};

// SYSTEM, then the longest prefix of `shots` that fits, then the target.
// `make_target(k)` renders the target keeping k source lines (k = npos: all).
inline BuiltPrompt pack_prompt(const std::string& system, const std::vector<Shot>& shots,
                               const std::function<std::string(std::size_t)>& make_target, std::size_t source_lines,
                               const PromptBudget& budget) {
  budget.validate();
  const int limit = budget.limit();
  const int sys_tokens = estimate_tokens(system, budget);
  BuiltPrompt out;
  std::string target = make_target(std::string::npos);
  int target_tokens = estimate_tokens(target, budget);
  if (sys_tokens + target_tokens > limit) {
    // Largest number of leading source lines that still fits.
    std::size_t lo = 0;
    std::size_t hi = source_lines;
    auto fits = [&](std::size_t k) { return sys_tokens + estimate_tokens(make_target(k), budget) <= limit; };
    if (!fits(0)) {
      throw Error(ErrorKind::kBudget, "target question exceeds the prompt budget even with the source truncated (" +
                                          std::to_string(sys_tokens + estimate_tokens(make_target(0), budget)) +
                                          " > " + std::to_string(limit) + " tokens)");
    }
    while (lo < hi) {
      std::size_t mid = lo + (hi - lo + 1) / 2;
      if (fits(mid)) lo = mid;
      else hi = mid - 1;
    }
    target = make_target(lo);
    target_tokens = estimate_tokens(target, budget);
    out.truncated = true;
  }
  int rest = limit - sys_tokens - target_tokens;
  out.messages.push_back({Role::kSystem, system});
  if (!out.truncated) {
    for (const auto& shot : shots) {
      int cost = estimate_tokens(shot.question, budget) + estimate_tokens(shot.answer, budget);
      if (cost > rest) break;
      out.messages.push_back({Role::kUser, shot.question});
      out.messages.push_back({Role::kAssistant, shot.answer});
      rest -= cost;
      ++out.shots;
    }
  }
  out.messages.push_back({Role::kUser, target});
  out.estimated_tokens = estimate_tokens(out.messages, budget);
  return out;
}

}  // namespace detail

inline BuiltPrompt build_mining_prompt(const ParameterSite& site, const ContextRegistry& registry,
                                       const PromptBudget& budget) {
  const TypeGroup group = site.group();
  const std::string options = detail::options_block(registry, group);
  std::vector<detail::Shot> shots;
  for (const auto* cat : registry.categories_for(group)) {
    if (cat->shot) shots.push_back({detail::with_options(cat->shot->question, options), cat->shot->answer});
  }
  const std::vector<std::string> lines = text::split_lines(site.method_source);
  auto make_target = [&](std::size_t keep) {
    std::string source = keep == std::string::npos ? site.method_source : detail::truncated_source(lines, keep);
    return detail::mining_question(site, source, options);
  };
  return detail::pack_prompt(mining_system_message(), shots, make_target, lines.size(), budget);
}

namespace detail {

inline std::string judging_question(const ReadabilityContext& context, std::string_view value,
                                    std::size_t max_examples = std::string::npos) {
  std::vector<std::string> examples;
  for (std::size_t i = 0; i < context.examples.size() && i < max_examples; ++i)
    examples.push_back(text::quoted(context.examples[i]));
  return "Context: " + context.name + "\nExamples of the context: " + text::join(examples, ", ") +
         "\nValue: " + text::quoted(value) + "\nDoes the value satisfy the context? Reply yes or no.";
}

}  // namespace detail

// Same budgeting as mining; shots pair each category's first context with
// its own first example. Oversized values or example lists are cut by
// dropping trailing examples.
inline BuiltPrompt build_judging_prompt(std::string_view value, const ReadabilityContext& context,
                                        const ContextRegistry& registry, const PromptBudget& budget) {
  std::vector<detail::Shot> shots;
  for (const auto* cat : registry.categories_for(context.group)) {
    auto members = registry.contexts_of_category(cat->name);
    const ReadabilityContext* first = nullptr;
    for (const auto* m : members)
      if (m->group == context.group && !m->examples.empty()) {
        first = m;
        break;
      }
    if (first) shots.push_back({detail::judging_question(*first, first->examples.front(), 1), "yes"});
  }
  auto make_target = [&](std::size_t keep) { return detail::judging_question(context, value, keep); };
  return detail::pack_prompt(judging_system_message(), shots, make_target, context.examples.size(), budget);
}

// ---- responses -------------------------------------------------------------

struct MiningOutcome {
  std::optional<std::string> context;  // nullopt means MISC
  bool is_misc() const { return !context.has_value(); }
  friend bool operator==(const MiningOutcome&, const MiningOutcome&) = default;
};

inline std::vector<std::string> response_tokens(std::string_view raw) {
  std::string norm;
  for (char c : raw) {
    char u = text::to_upper(c);
    norm.push_back(text::is_upper(u) || text::is_digit(u) || u == '_' ? u : ' ');
  }
  std::vector<std::string> out;
  for (auto& t : text::split(text::normalize_whitespace(norm), ' '))
    if (!t.empty()) out.push_back(std::move(t));
  return out;
}

// CONTEXT(name) iff exactly one registry name (of `group`, when given) occurs
// as a whole token; anything else is MISC.
inline MiningOutcome parse_mining_response(std::string_view raw, const ContextRegistry& registry,
                                           std::optional<TypeGroup> group = std::nullopt) {
  std::set<std::string> found;
  for (const auto& tok : response_tokens(raw)) {
    const auto* c = registry.find(tok);
    if (c && (!group || c->group == *group)) found.insert(tok);
  }
  if (found.size() == 1) return {*found.begin()};
  return {};
}

inline bool parse_judging_response(std::string_view raw) {
  auto tokens = response_tokens(raw);
  return !tokens.empty() && tokens.front() == "YES";
}

// ---- mining ----------------------------------------------------------------

inline constexpr std::string_view kMinedSchema = "c3.mined/1";

struct MiningResult {
  ParameterSite site;
  MiningOutcome outcome;
  std::string raw_response;
  std::string prompt_hash;
  std::string model_id;
  std::string project = "default";
  std::vector<std::string> votes;  // raw responses when voting
};

struct MineOptions {
  std::string model_id = "gpt-4-turbo";
  int votes = 1;
  int max_response_tokens = 20;
  std::string project = "default";
};

inline ChatRequest to_request(const BuiltPrompt& prompt, const MineOptions& options) {
  ChatRequest r;
  r.messages = prompt.messages;
  r.model_id = options.model_id;
  r.max_response_tokens = options.max_response_tokens;
  return r;
}

inline MiningResult mine_context(const ParameterSite& site, const ContextRegistry& registry,
                                 const PromptBudget& budget, LlmClient& client, const MineOptions& options = {}) {
  if (options.votes < 1) throw Error(ErrorKind::kInvalidArgument, "votes must be at least 1");
  MiningResult result;
  result.site = site;
  result.model_id = options.model_id;
  result.project = options.project;
  try {
    BuiltPrompt prompt = build_mining_prompt(site, registry, budget);
    ChatRequest request = to_request(prompt, options);
    result.prompt_hash = cache_key(request);
    if (options.votes == 1) {
      result.raw_response = client.complete(request);
      result.outcome = parse_mining_response(result.raw_response, registry, site.group());
      return result;
    }
    // Sampled votes: each request is distinct so the cache keeps them apart.
    std::map<std::string, int> tally;
    for (int v = 0; v < options.votes; ++v) {
      ChatRequest sample = request;
      sample.temperature = 1.0;
      sample.messages.front().content += "\nSample " + std::to_string(v + 1) + " of " + std::to_string(options.votes) + ".";
      std::string raw = client.complete(sample);
      result.votes.push_back(raw);
      auto outcome = parse_mining_response(raw, registry, site.group());
      tally[outcome.context.value_or("MISC")] += 1;
    }
    int best = 0;
    std::string winner = "MISC";
    bool tie = false;
    for (const auto& [name, count] : tally) {
      if (count > best) {
        best = count;
        winner = name;
        tie = false;
      } else if (count == best) {
        tie = true;
      }
    }
    result.raw_response = winner;
    if (!tie && winner != "MISC") result.outcome.context = winner;
    return result;
  } catch (const Error& e) {
    throw Error(e.kind(), site.key().to_string() + ": " + e.what());
  }
}

// Mines every site on up to `workers` threads; output is sorted by site key.
inline std::vector<MiningResult> mine_all(const std::vector<ParameterSite>& sites, const ContextRegistry& registry,
                                          const PromptBudget& budget, LlmClient& client,
                                          const MineOptions& options = {}, int workers = 4) {
  std::vector<std::optional<MiningResult>> slots(sites.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mu;
  std::optional<Error> first_error;
  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < sites.size(); i = next.fetch_add(1)) {
      try {
        slots[i] = mine_context(sites[i], registry, budget, client, options);
      } catch (const Error& e) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = e;
      }
    }
  };
  std::vector<std::thread> pool;
  int n = std::max(1, std::min<int>(workers, static_cast<int>(sites.size())));
  for (int t = 0; t < n; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (first_error) throw *first_error;
  std::vector<MiningResult> out;
  for (auto& s : slots) out.push_back(std::move(*s));
  std::stable_sort(out.begin(), out.end(),
                   [](const MiningResult& a, const MiningResult& b) { return a.site.key() < b.site.key(); });
  return out;
}

inline nlohmann::json to_json(const MiningResult& r) {
  nlohmann::json j{{"schema", kMinedSchema},
                   {"project", r.project},
                   {"site", to_json(r.site)},
                   {"outcome", r.outcome.is_misc() ? "MISC" : "CONTEXT"},
                   {"context", r.outcome.context ? nlohmann::json(*r.outcome.context) : nlohmann::json()},
                   {"raw_response", r.raw_response},
                   {"prompt_hash", r.prompt_hash},
                   {"model_id", r.model_id}};
  if (!r.votes.empty()) j["votes"] = r.votes;
  return j;
}

inline MiningResult mining_result_from_json(const nlohmann::json& j, const ContextRegistry& registry) {
  if (j.value("schema", std::string()) != kMinedSchema) {
    throw Error(ErrorKind::kParse, "unsupported mined record schema '" + j.value("schema", std::string()) + "'");
  }
  MiningResult r;
  try {
    r.site = site_from_json(j.at("site"));
    r.project = j.value("project", std::string("default"));
    std::string outcome = j.at("outcome").get<std::string>();
    if (outcome == "CONTEXT") {
      std::string name = j.at("context").get<std::string>();
      if (!registry.find(name)) throw Error(ErrorKind::kNotFound, "mined context '" + name + "' is not in the registry");
      r.outcome.context = name;
    } else if (outcome != "MISC") {
      throw Error(ErrorKind::kParse, "unknown outcome '" + outcome + "'");
    }
    r.raw_response = j.value("raw_response", std::string());
    r.prompt_hash = j.value("prompt_hash", std::string());
    r.model_id = j.value("model_id", std::string());
    r.votes = j.value("votes", std::vector<std::string>{});
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("malformed mined record: ") + e.what());
  }
  return r;
}

}  // namespace c3
