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

#include "c3/miner.hpp"

#include <unistd.h>

#include <filesystem>
#include <random>
#include <string>

#include "fake_chat_server.hpp"
#include "gtest/gtest.h"

namespace c3 {
namespace {

namespace fs = std::filesystem;
using testing_support::ScriptedChatServer;

const std::string kData = C3_TEST_DATA_DIR;

std::vector<ParameterSite> SitesOf(const std::string& rel) {
  return extract_parameters(read_source_unit(kData + "/java/" + rel, UnitKind::kCodeUnderTest));
}

ParameterSite Named(const std::vector<ParameterSite>& sites, const std::string& method,
                    const std::string& param) {
  for (const auto& s : sites)
    if (s.method_name == method && s.param_name == param) return s;
  throw std::runtime_error("no site " + method + "." + param);
}

ErrorKind KindOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::kIo;
}

LlmClient ScriptedClient(const std::string& url, const fs::path& cache) {
  LlmConfig c;
  c.endpoint = url;
  c.api_key = "k";
  c.cache_dir = cache;
  c.initial_backoff = std::chrono::milliseconds(1);
  return LlmClient(c);
}

fs::path FreshDir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("c3_miner_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  return dir;
}

TEST(EstimateTokens, BytesOverFourRoundedUp) {
  PromptBudget b;
  EXPECT_EQ(estimate_tokens("", b), 0);
  EXPECT_EQ(estimate_tokens("abcd", b), 1);
  EXPECT_EQ(estimate_tokens("abcde", b), 2);
  b.tokenizer_id = "words";
  EXPECT_EQ(estimate_tokens("  two words ", b), 2);
  b.tokenizer_id = "nope";
  EXPECT_EQ(KindOf([&] { estimate_tokens("x", b); }), ErrorKind::kInvalidArgument);
}

TEST(BuildMiningPrompt, StringSiteGetsAllStringShots) {
  ContextRegistry reg = builtin_registry();
  auto sites = SitesOf("user/User.java");
  ParameterSite email = Named(sites, "User", "email");
  BuiltPrompt p = build_mining_prompt(email, reg, PromptBudget{});
  ASSERT_EQ(p.shots, 6);
  ASSERT_EQ(p.messages.size(), 1u + 2 * 6 + 1);
  EXPECT_EQ(p.messages.front().role, Role::kSystem);
  std::vector<std::string> answers;
  for (std::size_t i = 2; i + 1 < p.messages.size(); i += 2) {
    EXPECT_EQ(p.messages[i].role, Role::kAssistant);
    answers.push_back(p.messages[i].content);
  }
  EXPECT_EQ(answers, (std::vector<std::string>{"EMAIL", "CITY", "DATE", "PERCENT", "PERSON", "MONEY"}));
  const std::string& target = p.messages.back().content;
  EXPECT_NE(target.find("Parameter name: email"), std::string::npos);
  EXPECT_NE(target.find("Method name: User"), std::string::npos);
  EXPECT_NE(target.find("// method under test"), std::string::npos);
  EXPECT_NE(target.find("Which context should the values of parameter \"email\" match?"), std::string::npos);
  EXPECT_NE(target.find("- EMAIL (e.g."), std::string::npos);
  EXPECT_NE(target.find("- MISC"), std::string::npos);
  EXPECT_EQ(target.find("- BINARY"), std::string::npos);
  EXPECT_EQ(target.find("operators involved"), std::string::npos);
  EXPECT_FALSE(p.truncated);
  EXPECT_LE(p.estimated_tokens, PromptBudget{}.limit());
}

TEST(BuildMiningPrompt, NumberSiteEndsWithItsOperators) {
  ContextRegistry reg = builtin_registry();
  ParameterSite a = Named(SitesOf("calc/Calc.java"), "or", "a");
  BuiltPrompt p = build_mining_prompt(a, reg, PromptBudget{});
  EXPECT_EQ(p.shots, 2);
  const std::string& target = p.messages.back().content;
  const std::string tail = "The operators involved by this parameter are [|]";
  ASSERT_GE(target.size(), tail.size());
  EXPECT_EQ(target.substr(target.size() - tail.size()), tail);
  EXPECT_NE(target.find("- BINARY (e.g. 0b100)"), std::string::npos);
  // The shot keeps its operator sentence after the option list.
  const std::string& shot = p.messages[1].content;
  EXPECT_LT(shot.find("- MISC"), shot.find("The operators involved by this parameter are [&]"));
  EXPECT_EQ(p.messages[2].content, "BINARY");
}

TEST(BuildMiningPrompt, TightBudgetDropsTrailingShots) {
  ContextRegistry reg = builtin_registry();
  ParameterSite email = Named(SitesOf("user/User.java"), "User", "email");
  BuiltPrompt full = build_mining_prompt(email, reg, PromptBudget{});
  int previous = -1;
  for (int max = 400; max <= full.estimated_tokens + 40; max += 7) {
    PromptBudget b{max, 20, "bytes4"};
    BuiltPrompt p = build_mining_prompt(email, reg, b);
    EXPECT_LE(p.estimated_tokens, b.limit());
    EXPECT_GE(p.shots, previous);
    previous = p.shots;
    // Always a prefix of the full shot list.
    for (int i = 0; i < p.shots; ++i) EXPECT_EQ(p.messages[1 + 2 * i].content, full.messages[1 + 2 * i].content);
  }
  EXPECT_EQ(previous, 6);
}

TEST(BuildMiningPrompt, LongSourceIsTruncatedThenRejected) {
  ContextRegistry reg = builtin_registry();
  ParameterSite site = Named(SitesOf("user/User.java"), "User", "email");
  std::string body;
  for (int i = 0; i < 400; ++i) body += "    this.log(\"line " + std::to_string(i) + "\");\n";
  site.method_source = "public User(String username, String password, String email) {\n" + body + "}";
  PromptBudget b{1200, 20, "bytes4"};
  BuiltPrompt p = build_mining_prompt(site, reg, b);
  EXPECT_TRUE(p.truncated);
  EXPECT_EQ(p.shots, 0);
  EXPECT_LE(p.estimated_tokens, b.limit());
  EXPECT_NE(p.messages.back().content.find("(truncated)"), std::string::npos);
  EXPECT_NE(p.messages.back().content.find("- MISC"), std::string::npos);

  EXPECT_EQ(KindOf([&] { build_mining_prompt(site, reg, PromptBudget{200, 20, "bytes4"}); }), ErrorKind::kBudget);
  EXPECT_EQ(KindOf([&] { build_mining_prompt(site, reg, PromptBudget{20, 20, "bytes4"}); }),
            ErrorKind::kInvalidArgument);
}

TEST(BuildJudgingPrompt, AsksYesOrNoWithinBudget) {
  ContextRegistry reg = builtin_registry();
  BuiltPrompt p = build_judging_prompt("testEmail", reg.lookup("EMAIL"), reg, PromptBudget{});
  EXPECT_EQ(p.shots, 6);
  const std::string& target = p.messages.back().content;
  EXPECT_NE(target.find("Context: EMAIL"), std::string::npos);
  EXPECT_NE(target.find("Value: \"testEmail\""), std::string::npos);
  EXPECT_NE(target.find("yes or no"), std::string::npos);
  for (std::size_t i = 2; i + 1 < p.messages.size(); i += 2) EXPECT_EQ(p.messages[i].content, "yes");
  PromptBudget tight{130, 20, "bytes4"};
  BuiltPrompt cut = build_judging_prompt("Nurse", reg.lookup("PERSON"), reg, tight);
  EXPECT_LE(cut.estimated_tokens, tight.limit());
}

TEST(BuildPrompts, FuzzedBudgetsStayWithinLimit) {
  ContextRegistry reg = builtin_registry();
  auto base = SitesOf("user/User.java");
  auto calc = SitesOf("calc/Calc.java");
  base.insert(base.end(), calc.begin(), calc.end());
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    ParameterSite site = base[rng() % base.size()];
    site.method_source += std::string(rng() % 3000, 'x');
    PromptBudget b{static_cast<int>(100 + rng() % 4000), static_cast<int>(1 + rng() % 60), "bytes4"};
    try {
      BuiltPrompt p = build_mining_prompt(site, reg, b);
      EXPECT_LE(estimate_tokens(p.messages, b), b.limit());
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kBudget);
    }
  }
}

TEST(ParseMiningResponse, ExactlyOneRegistryName) {
  ContextRegistry reg = builtin_registry();
  EXPECT_EQ(parse_mining_response("EMAIL", reg).context, "EMAIL");
  EXPECT_EQ(parse_mining_response("The context is: person.", reg).context, "PERSON");
  EXPECT_EQ(parse_mining_response("`BINARY`\n", reg).context, "BINARY");
  EXPECT_TRUE(parse_mining_response("MISC", reg).is_misc());
  EXPECT_TRUE(parse_mining_response("", reg).is_misc());
  EXPECT_TRUE(parse_mining_response("EMAIL or URL", reg).is_misc());
  EXPECT_TRUE(parse_mining_response("EMAILS", reg).is_misc());
  EXPECT_EQ(parse_mining_response("EMAIL, definitely EMAIL", reg).context, "EMAIL");
  EXPECT_TRUE(parse_mining_response("BINARY", reg, TypeGroup::kString).is_misc());
}

TEST(ParseJudgingResponse, LeadingYesOnly) {
  EXPECT_TRUE(parse_judging_response("yes"));
  EXPECT_TRUE(parse_judging_response("Yes."));
  EXPECT_FALSE(parse_judging_response("no"));
  EXPECT_FALSE(parse_judging_response("maybe yes"));
  EXPECT_FALSE(parse_judging_response(""));
}

TEST(MineContext, UsesTheChatBackendAndItsCache) {
  ContextRegistry reg = builtin_registry();
  ScriptedChatServer server({{{"parameter \"email\""}, "EMAIL"},
                             {{"parameter \"username\""}, "The answer is PERSON"},
                             {{"parameter \"password\""}, "MISC"}});
  fs::path dir = FreshDir("mine");
  LlmClient client = ScriptedClient(server.url(), dir);
  auto sites = SitesOf("user/User.java");
  auto results = mine_all(sites, reg, PromptBudget{}, client, MineOptions{}, 3);
  ASSERT_EQ(results.size(), sites.size());
  for (std::size_t i = 1; i < results.size(); ++i) EXPECT_LT(results[i - 1].site.key(), results[i].site.key());
  std::map<std::string, std::string> by_param;
  for (const auto& r : results) {
    if (r.site.method_name != "User") continue;
    by_param[r.site.param_name] = r.outcome.context.value_or("MISC");
    EXPECT_EQ(r.prompt_hash.size(), 64u);
    EXPECT_EQ(r.model_id, "gpt-4-turbo");
  }
  EXPECT_EQ(by_param["email"], "EMAIL");
  EXPECT_EQ(by_param["username"], "PERSON");
  EXPECT_EQ(by_param["password"], "MISC");
  int first = server.requests();
  mine_all(sites, reg, PromptBudget{}, client);
  EXPECT_EQ(server.requests(), first);
  fs::remove_all(dir);
}

TEST(MineContext, MajorityVote) {
  ContextRegistry reg = builtin_registry();
  ScriptedChatServer server({{{"Sample 1 of"}, "PERSON", true}, {{"Sample 2 of"}, "person!", true}}, "EMAIL");
  fs::path dir = FreshDir("votes");
  LlmClient client = ScriptedClient(server.url(), dir);
  ParameterSite email = Named(SitesOf("user/User.java"), "User", "email");
  MineOptions opts;
  opts.votes = 3;
  MiningResult r = mine_context(email, reg, PromptBudget{}, client, opts);
  EXPECT_EQ(r.votes.size(), 3u);
  EXPECT_EQ(server.requests(), 3);
  EXPECT_EQ(r.outcome.context, "PERSON");
  opts.votes = 0;
  EXPECT_EQ(KindOf([&] { mine_context(email, reg, PromptBudget{}, client, opts); }), ErrorKind::kInvalidArgument);
  fs::remove_all(dir);
}

TEST(MineContext, MissingCredentialNamesTheSite) {
  ContextRegistry reg = builtin_registry();
  LlmClient client{LlmConfig{}};
  ParameterSite email = Named(SitesOf("user/User.java"), "User", "email");
  try {
    mine_context(email, reg, PromptBudget{}, client);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kMissingCredential);
    EXPECT_NE(std::string(e.what()).find("org.airsonic.player.domain.User"), std::string::npos);
  }
}

TEST(MiningResult, JsonRoundTrip) {
  ContextRegistry reg = builtin_registry();
  MiningResult r;
  r.site = Named(SitesOf("calc/Calc.java"), "or", "b");
  r.outcome.context = "BINARY";
  r.raw_response = "BINARY";
  r.prompt_hash = std::string(64, 'a');
  r.model_id = "m";
  r.project = "calc";
  nlohmann::json j = to_json(r);
  EXPECT_EQ(j.at("schema"), "c3.mined/1");
  MiningResult back = mining_result_from_json(j, reg);
  EXPECT_EQ(back.site, r.site);
  EXPECT_EQ(back.outcome, r.outcome);
  EXPECT_EQ(back.project, "calc");
  j["context"] = "NOPE";
  EXPECT_EQ(KindOf([&] { mining_result_from_json(j, reg); }), ErrorKind::kNotFound);
  j["schema"] = "c3.mined/9";
  EXPECT_EQ(KindOf([&] { mining_result_from_json(j, reg); }), ErrorKind::kParse);
}

}  // namespace
}  // namespace c3
