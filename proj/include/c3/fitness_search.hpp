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

// Readability fitness and a many-objective genetic search for string inputs.
//
// f_c3(v, c) is 0 when v satisfies context c under the offline tools (regex
// and gazetteer NER) and otherwise the Jaro-Winkler distance from v to the
// nearest seed of c. f_c3invo takes the maximum over an invocation's
// value/context pairs.

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "c3/analysis_clients.hpp"
#include "c3/code_model.hpp"
#include "c3/context_registry.hpp"
#include "c3/error.hpp"
#include "c3/judge.hpp"
#include "c3/miner.hpp"
#include "c3/number_format.hpp"

namespace c3 {

// 1 - Jaro-Winkler similarity, prefix scale 0.1 over at most 4 characters.
inline double jaro_winkler_distance(std::string_view a, std::string_view b) {
  if (a == b) return 0.0;
  if (a.empty() || b.empty()) return 1.0;
  const std::size_t la = a.size();
  const std::size_t lb = b.size();
  const std::size_t window = std::max(la, lb) / 2 > 0 ? std::max(la, lb) / 2 - 1 : 0;
  std::vector<bool> a_matched(la, false);
  std::vector<bool> b_matched(lb, false);
  std::size_t m = 0;
  for (std::size_t i = 0; i < la; ++i) {
    std::size_t lo = i > window ? i - window : 0;
    std::size_t hi = std::min(lb, i + window + 1);
    for (std::size_t j = lo; j < hi; ++j) {
      if (b_matched[j] || a[i] != b[j]) continue;
      a_matched[i] = b_matched[j] = true;
      ++m;
      break;
    }
  }
  if (m == 0) return 1.0;
  std::size_t half_transpositions = 0;
  for (std::size_t i = 0, j = 0; i < la; ++i) {
    if (!a_matched[i]) continue;
    while (!b_matched[j]) ++j;
    if (a[i] != b[j]) ++half_transpositions;
    ++j;
  }
  const double md = static_cast<double>(m);
  const double t = static_cast<double>(half_transpositions) / 2.0;
  const double jaro = (md / static_cast<double>(la) + md / static_cast<double>(lb) + (md - t) / md) / 3.0;
  std::size_t prefix = 0;
  while (prefix < 4 && prefix < la && prefix < lb && a[prefix] == b[prefix]) ++prefix;
  const double sim = jaro + static_cast<double>(prefix) * 0.1 * (1.0 - jaro);
  return std::clamp(1.0 - sim, 0.0, 1.0);
}

// ---- goals -------------------------------------------------------------------

enum class GoalKind { kParam, kInvocation };

inline std::string_view to_string(GoalKind k) { return k == GoalKind::kParam ? "PARAM" : "INVOCATION"; }

struct GoalPair {
  int param_index = 0;
  std::string param_name;
  std::string context;
  friend bool operator==(const GoalPair&, const GoalPair&) = default;
};

struct FitnessGoal {
  GoalKind kind = GoalKind::kParam;
  std::string class_id;
  std::string method_sig;
  std::vector<GoalPair> pairs;  // exactly one for PARAM

  std::string describe() const {
    std::string out = std::string(to_string(kind)) + "(";
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (i) out += ", ";
      out += pairs[i].param_name.empty() ? "#" + std::to_string(pairs[i].param_index) : pairs[i].param_name;
      out += ":" + pairs[i].context;
    }
    return out + ")";
  }
  friend bool operator==(const FitnessGoal&, const FitnessGoal&) = default;
};

inline FitnessGoal param_goal(const ParameterSite& site, const std::string& context) {
  return {GoalKind::kParam, site.class_id, site.method_sig, {{site.param_index, site.param_name, context}}};
}

inline FitnessGoal invocation_goal(const std::vector<std::pair<ParameterSite, std::string>>& contexted) {
  if (contexted.empty()) throw Error(ErrorKind::kInvalidArgument, "an INVOCATION goal needs a contexted parameter");
  FitnessGoal g{GoalKind::kInvocation, contexted.front().first.class_id, contexted.front().first.method_sig, {}};
  for (const auto& [site, ctx] : contexted) g.pairs.push_back({site.param_index, site.param_name, ctx});
  std::sort(g.pairs.begin(), g.pairs.end(),
            [](const GoalPair& x, const GoalPair& y) { return x.param_index < y.param_index; });
  return g;
}

struct Candidate {
  std::map<int, std::string> assignment;
  std::size_t total_length() const {
    std::size_t n = 0;
    for (const auto& [i, v] : assignment) n += v.size();
    return n;
  }
  friend bool operator==(const Candidate&, const Candidate&) = default;
};

// ---- fitness -----------------------------------------------------------------

// Offline readability oracle over one registry: regex plus gazetteer NER.
class FitnessOracle {
 public:
  explicit FitnessOracle(const ContextRegistry& registry)
      : registry_(&registry), ner_(registry, NerBackend::kGazetteer) {}

  FitnessOracle(const FitnessOracle&) = delete;
  FitnessOracle& operator=(const FitnessOracle&) = delete;

  const ContextRegistry& registry() const { return *registry_; }

  bool is_satisfy(std::string_view value, const ReadabilityContext& context) const {
    require_string(context);
    JudgeTools tools;
    tools.registry = registry_;
    tools.ner = &ner_;
    JudgeConfig config;
    config.use_llm = false;
    return judge_value(value, context, config, tools).readable;
  }

  double min_distance(std::string_view value, const ReadabilityContext& context) const {
    const auto& seeds = get_seeds(context);
    double best = 1.0;
    for (const auto& s : seeds) {
      best = std::min(best, jaro_winkler_distance(value, s));
      if (best == 0.0) break;
    }
    return best;
  }

  double f_c3(std::string_view value, const ReadabilityContext& context) const {
    return is_satisfy(value, context) ? 0.0 : min_distance(value, context);
  }

  double f_c3(std::string_view value, std::string_view context) const { return f_c3(value, registry_->lookup(context)); }

  double f_c3invo(const Candidate& candidate, const FitnessGoal& goal) const {
    double worst = 0.0;
    for (const auto& p : goal.pairs) {
      auto it = candidate.assignment.find(p.param_index);
      if (it == candidate.assignment.end()) {
        throw Error(ErrorKind::kInvalidArgument,
                    "candidate leaves parameter " + std::to_string(p.param_index) + " of " + goal.describe() + " unassigned");
      }
      worst = std::max(worst, f_c3(it->second, p.context));
    }
    return worst;
  }

  // f_c3 for PARAM goals, f_c3invo for INVOCATION goals.
  double goal_fitness(const Candidate& candidate, const FitnessGoal& goal) const { return f_c3invo(candidate, goal); }

 private:
  static void require_string(const ReadabilityContext& context) {
    if (context.group != TypeGroup::kString) {
      throw Error(ErrorKind::kPrecondition, "context " + context.name + " is not a STRING context");
    }
  }

  const ContextRegistry* registry_;
  NerClient ner_;
};

// ---- search ------------------------------------------------------------------

inline constexpr std::string_view kSynthesizedSchema = "c3.synthesized/1";

struct SearchConfig {
  int population = 50;
  int max_generations = 200;
  std::uint64_t rng_seed = 0;
  double crossover_rate = 0.75;
  double insert_rate = 0.5;
  double delete_rate = 0.5;
  double replace_rate = 0.5;
  double seed_injection_prob = 0.3;
  int max_initial_length = 12;

  void validate() const {
    if (population < 2) throw Error(ErrorKind::kInvalidArgument, "population must be at least 2");
    if (max_generations < 0) throw Error(ErrorKind::kInvalidArgument, "max_generations must not be negative");
    if (max_initial_length < 0) throw Error(ErrorKind::kInvalidArgument, "max_initial_length must not be negative");
    for (double p : {crossover_rate, insert_rate, delete_rate, replace_rate, seed_injection_prob}) {
      if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::kInvalidArgument, "search probabilities must lie in [0,1]");
    }
  }
};

struct GoalOutcome {
  FitnessGoal goal;
  bool covered = false;
  std::optional<int> covered_at;  // generation of first archival
  Candidate best;                 // archived candidate when covered
  double best_fitness = 1.0;
};

struct SynthesisResult {
  std::string class_id;
  std::string method_sig;
  std::uint64_t rng_seed = 0;
  int generations_used = 0;
  std::vector<GoalOutcome> goals;

  std::size_t covered_count() const {
    return static_cast<std::size_t>(std::count_if(goals.begin(), goals.end(), [](const auto& g) { return g.covered; }));
  }
};

namespace detail {

struct Individual {
  Candidate candidate;
  std::vector<double> fitness;
};

class SearchRun {
 public:
  SearchRun(const std::vector<FitnessGoal>& goals, const FitnessOracle& oracle, const SearchConfig& config)
      : goals_(goals), oracle_(oracle), config_(config), rng_(config.rng_seed) {
    for (const auto& g : goals_) {
      for (const auto& p : g.pairs) {
        const auto& ctx = oracle_.registry().lookup(p.context);
        if (ctx.group != TypeGroup::kString) {
          throw Error(ErrorKind::kPrecondition, "goal " + g.describe() + " names NUMBER context " + p.context);
        }
        auto [it, fresh] = gene_context_.emplace(p.param_index, p.context);
        if (!fresh && it->second != p.context) {
          throw Error(ErrorKind::kInvalidArgument, "parameter " + std::to_string(p.param_index) +
                                                       " carries two contexts: " + it->second + " and " + p.context);
        }
      }
    }
    for (const auto& [index, ctx] : gene_context_) genes_.push_back(index);
    outcomes_.reserve(goals_.size());
    for (const auto& g : goals_) outcomes_.push_back({g, false, std::nullopt, {}, 2.0});
  }

  SynthesisResult run() {
    std::vector<Individual> population;
    for (int i = 0; i < config_.population; ++i) population.push_back(evaluate(random_candidate()));
    update_archive(population, 0);
    int generation = 0;
    while (generation < config_.max_generations && !all_covered()) {
      ++generation;
      std::vector<Individual> offspring;
      while (static_cast<int>(offspring.size()) < config_.population) {
        Candidate a = tournament(population).candidate;
        Candidate b = tournament(population).candidate;
        if (chance(config_.crossover_rate)) crossover(a, b);
        mutate(a);
        mutate(b);
        offspring.push_back(evaluate(std::move(a)));
        if (static_cast<int>(offspring.size()) < config_.population) offspring.push_back(evaluate(std::move(b)));
      }
      update_archive(offspring, generation);
      for (auto& o : offspring) population.push_back(std::move(o));
      population = select(std::move(population));
    }
    SynthesisResult result;
    result.class_id = goals_.front().class_id;
    result.method_sig = goals_.front().method_sig;
    result.rng_seed = config_.rng_seed;
    result.generations_used = generation;
    result.goals = outcomes_;
    return result;
  }

 private:
  bool chance(double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < p; }
  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  char random_char() { return static_cast<char>(32 + pick(95)); }

  const std::string& random_seed(int gene) {
    const auto& seeds = get_seeds(oracle_.registry().lookup(gene_context_.at(gene)));
    return seeds[pick(seeds.size())];
  }

  Candidate random_candidate() {
    Candidate c;
    for (int gene : genes_) {
      if (chance(config_.seed_injection_prob)) {
        c.assignment[gene] = random_seed(gene);
        continue;
      }
      std::string s(pick(static_cast<std::size_t>(config_.max_initial_length) + 1), ' ');
      for (auto& ch : s) ch = random_char();
      c.assignment[gene] = s;
    }
    return c;
  }

  void mutate_gene(int gene, std::string& value) {
    if (chance(config_.seed_injection_prob)) {
      value = random_seed(gene);
      return;
    }
    if (!value.empty() && chance(config_.delete_rate)) value.erase(pick(value.size()), 1);
    if (chance(config_.insert_rate)) value.insert(value.begin() + static_cast<std::ptrdiff_t>(pick(value.size() + 1)), random_char());
    if (!value.empty() && chance(config_.replace_rate)) value[pick(value.size())] = random_char();
  }

  void mutate(Candidate& c) {
    const double p = 1.0 / static_cast<double>(genes_.size());
    bool any = false;
    for (int gene : genes_) {
      if (chance(p)) {
        mutate_gene(gene, c.assignment[gene]);
        any = true;
      }
    }
    if (!any) {
      int gene = genes_[pick(genes_.size())];
      mutate_gene(gene, c.assignment[gene]);
    }
  }

  void crossover(Candidate& a, Candidate& b) {
    if (genes_.size() < 2) return;
    std::size_t cut = 1 + pick(genes_.size() - 1);
    for (std::size_t i = cut; i < genes_.size(); ++i) std::swap(a.assignment[genes_[i]], b.assignment[genes_[i]]);
  }

  Individual evaluate(Candidate c) {
    Individual ind{std::move(c), {}};
    for (const auto& g : goals_) {
      double worst = 0.0;
      for (const auto& p : g.pairs) worst = std::max(worst, cached_f_c3(ind.candidate.assignment.at(p.param_index), p.context));
      ind.fitness.push_back(worst);
    }
    return ind;
  }

  double cached_f_c3(const std::string& value, const std::string& context) {
    std::string key = context;
    key.push_back('\0');
    key += value;
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    double f = oracle_.f_c3(value, context);
    cache_.emplace(std::move(key), f);
    return f;
  }

  bool all_covered() const {
    return std::all_of(outcomes_.begin(), outcomes_.end(), [](const auto& o) { return o.covered; });
  }

  void update_archive(const std::vector<Individual>& individuals, int generation) {
    for (std::size_t g = 0; g < goals_.size(); ++g) {
      auto& out = outcomes_[g];
      if (out.covered) continue;
      for (const auto& ind : individuals) {
        double f = ind.fitness[g];
        bool better = f < out.best_fitness ||
                      (f == out.best_fitness && ind.candidate.total_length() < out.best.total_length());
        if (better) {
          out.best = ind.candidate;
          out.best_fitness = f;
        }
        if (f == 0.0) {
          out.best = ind.candidate;
          out.best_fitness = 0.0;
          out.covered = true;
          out.covered_at = generation;
          break;
        }
      }
    }
  }

  // Preference ranking over uncovered goals: each individual's rank is its
  // best position across the per-goal orderings; ties go to the smaller goal
  // index and then to the shorter total assignment.
  struct RankKey {
    std::size_t position;
    std::size_t goal;
    std::size_t length;
    std::size_t order;
    bool operator<(const RankKey& o) const {
      return std::tie(position, goal, length, order) < std::tie(o.position, o.goal, o.length, o.order);
    }
  };

  std::vector<RankKey> rank(const std::vector<Individual>& pool) const {
    std::vector<RankKey> keys;
    for (std::size_t i = 0; i < pool.size(); ++i)
      keys.push_back({pool.size(), goals_.size(), pool[i].candidate.total_length(), i});
    std::vector<std::size_t> idx(pool.size());
    for (std::size_t g = 0; g < goals_.size(); ++g) {
      if (outcomes_[g].covered) continue;
      std::iota(idx.begin(), idx.end(), 0);
      std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
        if (pool[x].fitness[g] != pool[y].fitness[g]) return pool[x].fitness[g] < pool[y].fitness[g];
        return keys[x].length < keys[y].length;
      });
      for (std::size_t pos = 0; pos < idx.size(); ++pos) {
        auto& k = keys[idx[pos]];
        if (pos < k.position) {
          k.position = pos;
          k.goal = g;
        }
      }
    }
    return keys;
  }

  const Individual& tournament(const std::vector<Individual>& population) {
    if (rank_cache_.size() != population.size() || rank_stale_) {
      rank_cache_ = rank(population);
      rank_stale_ = false;
    }
    std::size_t x = pick(population.size());
    std::size_t y = pick(population.size());
    return rank_cache_[y] < rank_cache_[x] ? population[y] : population[x];
  }

  std::vector<Individual> select(std::vector<Individual> pool) {
    auto keys = rank(pool);
    std::vector<std::size_t> idx(pool.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return keys[x] < keys[y]; });
    std::vector<Individual> next;
    for (std::size_t i = 0; i < idx.size() && static_cast<int>(next.size()) < config_.population; ++i)
      next.push_back(std::move(pool[idx[i]]));
    rank_stale_ = true;
    return next;
  }

  const std::vector<FitnessGoal>& goals_;
  const FitnessOracle& oracle_;
  SearchConfig config_;
  std::mt19937_64 rng_;
  std::map<int, std::string> gene_context_;
  std::vector<int> genes_;
  std::vector<GoalOutcome> outcomes_;
  std::unordered_map<std::string, double> cache_;
  std::vector<RankKey> rank_cache_;
  bool rank_stale_ = true;
};

}  // namespace detail

inline SynthesisResult synthesize_inputs(const std::vector<FitnessGoal>& goals, const FitnessOracle& oracle,
                                         const SearchConfig& config) {
  if (goals.empty()) throw Error(ErrorKind::kInvalidArgument, "synthesis needs at least one goal");
  config.validate();
  for (const auto& g : goals) {
    if (g.pairs.empty()) throw Error(ErrorKind::kInvalidArgument, "goal " + g.describe() + " lists no parameter");
    if (g.kind == GoalKind::kParam && g.pairs.size() != 1) {
      throw Error(ErrorKind::kInvalidArgument, "PARAM goal " + g.describe() + " must name exactly one parameter");
    }
    if (g.class_id != goals.front().class_id || g.method_sig != goals.front().method_sig) {
      throw Error(ErrorKind::kInvalidArgument, "all goals of one search must target the same method");
    }
  }
  return detail::SearchRun(goals, oracle, config).run();
}

// PARAM goals for every STRING site mined to a context, plus one INVOCATION
// goal per method with two or more such sites. Grouped by method.
inline std::vector<std::vector<FitnessGoal>> goals_from_mined(const std::vector<MiningResult>& mined,
                                                              const ContextRegistry& registry) {
  std::map<std::pair<std::string, std::string>, std::vector<std::pair<ParameterSite, std::string>>> by_method;
  for (const auto& m : mined) {
    if (m.outcome.is_misc() || m.site.group() != TypeGroup::kString) continue;
    if (registry.lookup(*m.outcome.context).group != TypeGroup::kString) continue;
    by_method[{m.site.class_id, m.site.method_sig}].emplace_back(m.site, *m.outcome.context);
  }
  std::vector<std::vector<FitnessGoal>> out;
  for (auto& [method, sites] : by_method) {
    std::sort(sites.begin(), sites.end(),
              [](const auto& a, const auto& b) { return a.first.param_index < b.first.param_index; });
    std::vector<FitnessGoal> goals;
    for (const auto& [site, ctx] : sites) goals.push_back(param_goal(site, ctx));
    if (sites.size() >= 2) goals.push_back(invocation_goal(sites));
    out.push_back(std::move(goals));
  }
  return out;
}

// ---- number post-processing --------------------------------------------------

struct LiteralRewrite {
  std::size_t offset = 0;
  std::string before;
  std::string after;
  std::string context;
  std::string test_id;
};

struct ReformattedUnit {
  SourceUnit unit;
  std::vector<LiteralRewrite> rewrites;
};

// Rewrites every number literal bound to a NUMBER-contexted site. Binary
// operands of one invocation are padded to a common width.
inline ReformattedUnit reformat_candidate_numbers(const SourceUnit& test, const std::vector<MiningResult>& mined,
                                                  const ContextRegistry& registry) {
  std::vector<ParameterSite> sites;
  std::map<SiteKey, std::string> context_of;
  for (const auto& m : mined) {
    if (m.outcome.is_misc() || m.site.group() != TypeGroup::kNumber) continue;
    if (registry.lookup(*m.outcome.context).group != TypeGroup::kNumber) continue;
    sites.push_back(m.site);
    context_of[m.site.key()] = *m.outcome.context;
  }
  ReformattedUnit out{test, {}};
  if (sites.empty()) return out;

  std::map<std::size_t, const BoundInput*> by_offset;
  const auto inputs = extract_test_inputs(test, sites);
  for (const auto& in : inputs) {
    if (in.value_kind != TypeGroup::kNumber) continue;
    if (test.text.compare(in.offset, in.literal_text.size(), in.literal_text) != 0) {
      throw Error(ErrorKind::kPrecondition, "literal '" + in.literal_text + "' of " + in.test_id + " is not at its offset");
    }
    by_offset.emplace(in.offset, &in);
  }

  std::map<std::size_t, std::size_t> binary_width;  // call offset -> widest operand
  for (const auto& [offset, in] : by_offset) {
    if (context_of.at(in->site) != "BINARY") continue;
    auto lit = parse_number_literal(in->literal_text);
    std::string bits = rewrite_number_literal(in->literal_text, registry.lookup("BINARY"));
    std::size_t width = bits.size() - bits.find_first_of("bB") - 1 - lit.suffix.size();
    auto& w = binary_width[in->call_offset];
    w = std::max(w, width);
  }

  for (const auto& [offset, in] : by_offset) {
    const std::string& ctx = context_of.at(in->site);
    std::size_t pad = ctx == "BINARY" ? binary_width[in->call_offset] : 0;
    std::string after = rewrite_number_literal(in->literal_text, registry.lookup(ctx), registry.fixed_length_width(), pad);
    if (after != in->literal_text) out.rewrites.push_back({offset, in->literal_text, after, ctx, in->test_id});
  }
  for (auto it = out.rewrites.rbegin(); it != out.rewrites.rend(); ++it)
    out.unit.text.replace(it->offset, it->before.size(), it->after);
  return out;
}

// ---- serialization -----------------------------------------------------------

inline nlohmann::json to_json(const FitnessGoal& g) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : g.pairs)
    pairs.push_back({{"param_index", p.param_index}, {"param_name", p.param_name}, {"context", p.context}});
  return {{"kind", to_string(g.kind)}, {"class_id", g.class_id}, {"method_sig", g.method_sig}, {"pairs", pairs}};
}

inline nlohmann::json to_json(const Candidate& c) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [i, v] : c.assignment) j[std::to_string(i)] = v;
  return j;
}

inline nlohmann::json to_json(const SynthesisResult& r) {
  nlohmann::json goals = nlohmann::json::array();
  for (const auto& o : r.goals) {
    goals.push_back({{"goal", to_json(o.goal)},
                     {"covered", o.covered},
                     {"covered_at", o.covered_at ? nlohmann::json(*o.covered_at) : nlohmann::json()},
                     {"values", to_json(o.best)},
                     {"fitness", o.best_fitness}});
  }
  return {{"schema", kSynthesizedSchema},
          {"class_id", r.class_id},
          {"method_sig", r.method_sig},
          {"rng_seed", r.rng_seed},
          {"generations_used", r.generations_used},
          {"covered_goals", r.covered_count()},
          {"total_goals", r.goals.size()},
          {"goals", goals}};
}

}  // namespace c3
