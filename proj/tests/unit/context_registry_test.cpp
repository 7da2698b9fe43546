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

#include "c3/context_registry.hpp"

#include <algorithm>
#include <string>

#include "gtest/gtest.h"

namespace c3 {
namespace {

using nlohmann::json;

json MrsRole() {
  return json{{"contexts",
               {{{"name", "MRS_ROLE"},
                 {"group", "STRING"},
                 {"examples", {"Medical Student", "Doctor", "Data Manager"}}}}}};
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

TEST(LoadRegistry, DefaultHasTheBuiltInContexts) {
  ContextRegistry reg = builtin_registry();
  EXPECT_EQ(reg.contexts().size(), 29u);
  EXPECT_EQ(reg.contexts_in(TypeGroup::kString).size(), 23u);
  EXPECT_EQ(reg.contexts_in(TypeGroup::kNumber).size(), 6u);
  for (const char* name : {"PERSON", "EMAIL", "BINARY", "LONGNUMBER"}) EXPECT_NE(reg.find(name), nullptr) << name;
  EXPECT_EQ(load_registry(json()), reg);
}

TEST(LoadRegistry, JudgeMethodsFollowTheContextProfile) {
  ContextRegistry reg = builtin_registry();
  for (const auto& c : reg.contexts()) {
    if (c.category == "Cyberspace") {
      EXPECT_EQ(c.judge_method, JudgeMethod::kLlmRegex) << c.name;
    } else if (c.group == TypeGroup::kString) {
      EXPECT_EQ(c.judge_method, JudgeMethod::kLlmNer) << c.name;
    } else if (c.category == "Base Formats") {
      EXPECT_EQ(c.judge_method, JudgeMethod::kRegex) << c.name;
    } else {
      EXPECT_EQ(c.judge_method, JudgeMethod::kRuleRegex) << c.name;
    }
    bool needs_regex = c.judge_method != JudgeMethod::kLlmNer && !has_procedural_rule(c.name);
    EXPECT_EQ(c.regex.has_value(), needs_regex) << c.name;
    EXPECT_TRUE(is_valid_context_name(c.name));
    EXPECT_FALSE(c.examples.empty());
  }
}

TEST(LoadRegistry, CategoriesAreOrderedWithOneShotEach) {
  ContextRegistry reg = builtin_registry();
  std::vector<std::string> names;
  for (const auto& cat : reg.categories()) {
    names.push_back(cat.name);
    ASSERT_TRUE(cat.shot.has_value()) << cat.name;
    EXPECT_NE(reg.find(cat.shot->answer), nullptr);
  }
  std::vector<std::string> expected = {"Cyberspace", "Geo-Abstract Location", "Temporal", "Number",
                                       "Personal Identifier", "Finance", "Base Formats", "Other Formats"};
  EXPECT_EQ(names, expected);
}

TEST(LoadRegistry, GazetteersAreLargeEnough) {
  ContextRegistry reg = builtin_registry();
  EXPECT_EQ(reg.gazetteers().size(), 16u);
  for (const auto& [label, terms] : reg.gazetteers()) {
    EXPECT_GE(terms.size(), 50u) << label;
    EXPECT_NE(reg.find(label), nullptr) << label;
  }
}

TEST(LoadRegistry, UserContextExtendsTheRegistry) {
  ContextRegistry reg = load_registry(MrsRole());
  EXPECT_EQ(reg.contexts().size(), 30u);
  const auto& role = reg.lookup("MRS_ROLE");
  EXPECT_EQ(role.judge_method, JudgeMethod::kLlmNer);
  EXPECT_EQ(role.category, "User Defined");
  EXPECT_EQ(get_seeds(role), role.examples);
  EXPECT_EQ(reg.categories().back().name, "User Defined");
  EXPECT_FALSE(reg.categories().back().shot.has_value());
}

TEST(LoadRegistry, Errors) {
  json dup{{"contexts", {{{"name", "EMAIL"}, {"group", "STRING"}, {"examples", {"a@b.c"}}}}}};
  EXPECT_EQ(KindOf([&] { load_registry(dup); }), ErrorKind::kDuplicate);

  json twice = MrsRole();
  twice["contexts"].push_back(twice["contexts"][0]);
  EXPECT_EQ(KindOf([&] { load_registry(twice); }), ErrorKind::kDuplicate);

  json no_examples{{"contexts", {{{"name", "X_Y"}, {"group", "STRING"}}}}};
  EXPECT_EQ(KindOf([&] { load_registry(no_examples); }), ErrorKind::kInvalidArgument);

  json bad_regex{{"contexts",
                  {{{"name", "ZIP"}, {"group", "STRING"}, {"judge_method", "LLM_REGEX"},
                    {"examples", {"12345"}}, {"regex", "^[0-9{5$"}}}}};
  EXPECT_EQ(KindOf([&] { load_registry(bad_regex); }), ErrorKind::kInvalidArgument);

  json bad_name{{"contexts", {{{"name", "lower"}, {"group", "STRING"}, {"examples", {"x"}}}}}};
  EXPECT_EQ(KindOf([&] { load_registry(bad_name); }), ErrorKind::kInvalidArgument);

  EXPECT_EQ(KindOf([&] { load_registry(std::string_view("{\"contexts\": [")); }), ErrorKind::kParse);
  EXPECT_EQ(KindOf([&] { load_registry(json{{"contexts", 3}}); }), ErrorKind::kParse);
}

TEST(Lookup, FindsByName) {
  ContextRegistry reg = builtin_registry();
  const auto& person = reg.lookup("PERSON");
  EXPECT_EQ(person.group, TypeGroup::kString);
  EXPECT_EQ(person.category, "Personal Identifier");
  EXPECT_EQ(reg.lookup("BINARY").judge_method, JudgeMethod::kRegex);
  EXPECT_EQ(KindOf([&] { reg.lookup("NOPE"); }), ErrorKind::kNotFound);
}

TEST(GetSeeds, CitySeedsIncludeTheRegistryExamples) {
  ContextRegistry reg = builtin_registry();
  const auto& seeds = get_seeds(reg.lookup("CITY"));
  EXPECT_NE(std::find(seeds.begin(), seeds.end(), "Beijing"), seeds.end());
  EXPECT_NE(std::find(seeds.begin(), seeds.end(), "London"), seeds.end());
}

TEST(GetSeeds, RegexSeedsMatchTheirOwnPattern) {
  ContextRegistry reg = builtin_registry();
  for (const auto* c : reg.contexts_in(TypeGroup::kString)) {
    const auto& seeds = get_seeds(*c);
    EXPECT_GE(seeds.size(), 20u) << c->name;
    if (!c->regex) continue;
    for (const auto& s : seeds) EXPECT_TRUE(c->matches(s)) << c->name << ": " << s;
  }
}

TEST(GetSeeds, NumberContextsHaveNone) {
  ContextRegistry reg = builtin_registry();
  EXPECT_EQ(KindOf([&] { get_seeds(reg.lookup("BINARY")); }), ErrorKind::kPrecondition);
}

TEST(Registry, GenericContextsCarryNoRegex) {
  ContextRegistry reg = builtin_registry();
  for (const char* name : {"LOCATION", "TIME"}) {
    EXPECT_TRUE(reg.lookup(name).generic) << name;
    EXPECT_FALSE(reg.lookup(name).regex.has_value()) << name;
  }
  json generic_regex{{"contexts",
                      {{{"name", "AREA"}, {"group", "STRING"}, {"generic", true}, {"judge_method", "LLM_REGEX"},
                        {"examples", {"x"}}, {"regex", "^x$"}}}}};
  EXPECT_EQ(KindOf([&] { load_registry(generic_regex); }), ErrorKind::kInvalidArgument);
}

TEST(Registry, SerializeAndReloadRoundTrips) {
  ContextRegistry reg = load_registry(MrsRole());
  ContextRegistry again = load_registry(to_document(reg));
  EXPECT_EQ(again, reg);
  EXPECT_EQ(load_registry(std::string_view(to_document(again).dump(2))), reg);
}

TEST(Registry, BuiltInRegexesAreAnchored) {
  ContextRegistry reg = builtin_registry();
  EXPECT_TRUE(reg.lookup("BINARY").matches("0b100"));
  EXPECT_FALSE(reg.lookup("BINARY").matches("x0b100"));
  EXPECT_FALSE(reg.lookup("EMAIL").matches("simon@example"));
  EXPECT_TRUE(reg.lookup("NETADDR").matches("192.168.0.1:8080"));
  EXPECT_FALSE(reg.lookup("NETADDR").matches("256.1.1.1"));
  EXPECT_TRUE(reg.lookup("PATH").matches("/usr/local/bin"));
  EXPECT_FALSE(reg.lookup("PATH").matches("README"));
}

}  // namespace
}  // namespace c3
