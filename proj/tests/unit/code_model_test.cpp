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

#include "c3/code_model.hpp"

#include <string>
#include <vector>

#include "gtest/gtest.h"

namespace c3 {
namespace {

const std::string kData = C3_TEST_DATA_DIR;

SourceUnit Cut(std::string text) { return SourceUnit{"Cut.java", std::move(text), UnitKind::kCodeUnderTest}; }
SourceUnit TestUnit(std::string text) { return SourceUnit{"CutTest.java", std::move(text), UnitKind::kTest}; }

TEST(Lexer, TokenizesOperatorsLongestFirst) {
  auto lexed = java::lex("a >>>= b >> c >>> 1_000L; s = \"x\\\"y\";");
  std::vector<std::string> texts;
  for (const auto& t : lexed.tokens) texts.emplace_back(t.text);
  std::vector<std::string> expected = {"a", ">>>=", "b", ">>", "c", ">>>", "1_000L", ";",
                                       "s", "=",    "\"x\\\"y\"", ";", ""};
  EXPECT_EQ(texts, expected);
}

TEST(Lexer, ReportsLocationOfUnterminatedString) {
  try {
    java::lex("class A {\n  String s = \"oops;\n}", "A.java");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.path(), "A.java");
    EXPECT_EQ(e.line(), 2);
  }
}

TEST(Lexer, DecodesEscapes) {
  EXPECT_EQ(java::decode_string_literal(R"("a\tb\"c")"), "a\tb\"c");
  EXPECT_EQ(java::decode_string_literal(R"("\u00e9")"), "\xc3\xa9");
  EXPECT_EQ(java::decode_string_literal(R"("\101")"), "A");
  EXPECT_EQ(java::decode_string_literal("\"\"\"\n  hi\n  \"\"\""), "  hi\n  ");
}

TEST(ExtractParameters, UserConstructorHasThreeStringSites) {
  auto sites = extract_parameters(read_source_unit(kData + "/java/user/User.java", UnitKind::kCodeUnderTest));
  ASSERT_EQ(sites.size(), 4u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(sites[i].class_id, "org.airsonic.player.domain.User");
    EXPECT_EQ(sites[i].method_sig, "User(String,String,String)");
    EXPECT_EQ(sites[i].param_index, i);
    EXPECT_EQ(sites[i].declared_type, DeclaredType::kString);
    EXPECT_TRUE(sites[i].operators.empty());
    EXPECT_TRUE(sites[i].is_constructor);
  }
  EXPECT_EQ(sites[0].param_name, "username");
  EXPECT_EQ(sites[2].param_name, "email");
  EXPECT_EQ(sites[0].method_source.rfind("// method under test", 0), 0u);
  EXPECT_EQ(sites[0].method_source.find("getUsername"), std::string::npos);
  EXPECT_EQ(sites[0].method_source.back(), '}');
  EXPECT_EQ(sites[3].method_sig, "setEmail(String)");
}

TEST(ExtractParameters, BitwiseOrRecordsOperators) {
  auto sites = extract_parameters(Cut("class C { int or(int a, int b){ return a | b; } }"));
  ASSERT_EQ(sites.size(), 2u);
  EXPECT_EQ(sites[0].declared_type, DeclaredType::kInt);
  EXPECT_EQ(sites[0].operators, std::vector<std::string>{"|"});
  EXPECT_EQ(sites[1].operators, std::vector<std::string>{"|"});
  EXPECT_EQ(sites[0].method_source, "int or(int a, int b){ return a | b; }");
}

TEST(ExtractParameters, CharAndBooleanAreOmitted) {
  EXPECT_TRUE(extract_parameters(Cut("class C { void f(char c, boolean b) {} }")).empty());
}

TEST(ExtractParameters, BoxedArraysAndVarargsAreOmitted) {
  auto sites = extract_parameters(
      Cut("class C { void f(Integer i, int[] a, String... s, java.lang.String t, double d[]) {} }"));
  ASSERT_EQ(sites.size(), 1u);
  EXPECT_EQ(sites[0].param_name, "t");
  EXPECT_EQ(sites[0].param_index, 3);
  EXPECT_EQ(sites[0].method_sig, "f(Integer,int[],String...,java.lang.String,double[])");
}

TEST(ExtractParameters, EmptyUnitYieldsNothing) {
  EXPECT_TRUE(extract_parameters(Cut("")).empty());
  EXPECT_TRUE(extract_parameters(Cut("package a.b;\nimport java.util.*;\n")).empty());
}

TEST(ExtractParameters, CompoundAssignmentShiftsAndUnaryOperators) {
  auto sites = extract_parameters(Cut(R"(
    class C {
      long f(long x, int s, short m) {
        x <<= s;
        long y = ~m + (x >>> 2) % s;
        return y * -x;
      }
    })"));
  ASSERT_EQ(sites.size(), 3u);
  EXPECT_EQ(sites[0].operators, (std::vector<std::string>{"<<", ">>>", "+", "-"}));
  EXPECT_EQ(sites[1].operators, (std::vector<std::string>{"<<", "%"}));
  EXPECT_EQ(sites[2].operators, (std::vector<std::string>{"~", "+"}));
}

TEST(ExtractParameters, MemberAccessIsNotAnOperatorUse) {
  auto sites = extract_parameters(Cut("class C { int f(int n) { return this.n + other.n(n); } }"));
  ASSERT_EQ(sites.size(), 1u);
  EXPECT_TRUE(sites[0].operators.empty());
}

TEST(ExtractParameters, NestedTypesGenericsAndAnnotations) {
  auto sites = extract_parameters(Cut(R"(
    package p;
    import java.util.Map;
    @SuppressWarnings("x")
    public final class Outer<T extends Comparable<T>> implements Runnable {
      private Map<String, java.util.List<Integer>> m = new java.util.HashMap<>();
      static { init(); }
      public enum Mode { A("a") { void g() {} }, B("b"); Mode(String label) {} }
      interface Sink { void put(@Deprecated final String key, int v); }
      public <K> K pick(Map<K, ?> map, byte b) throws Exception { return null; }
      record Point(int x, int y) { Point { } }
      public void run() {}
    })"));
  std::vector<std::string> got;
  for (const auto& s : sites) got.push_back(s.class_id + "#" + s.method_sig + "@" + std::to_string(s.param_index));
  std::vector<std::string> expected = {"p.Outer#pick(Map<K,?>,byte)@1", "p.Outer.Mode#Mode(String)@0",
                                       "p.Outer.Sink#put(String,int)@0", "p.Outer.Sink#put(String,int)@1"};
  EXPECT_EQ(got, expected);
}

TEST(ExtractParameters, ReportsParseErrorLocation) {
  try {
    extract_parameters(Cut("class C {\n  void f(int a) {}\n  = 3;\n}"));
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.path(), "Cut.java");
    EXPECT_EQ(e.line(), 3);
  }
}

TEST(ExtractParameters, IsDeterministic) {
  auto unit = read_source_unit(kData + "/java/calc/Calc.java", UnitKind::kCodeUnderTest);
  EXPECT_EQ(extract_parameters(unit), extract_parameters(unit));
}

TEST(ExtractTestInputs, CodeOneDirectLiterals) {
  auto sites = extract_parameters(read_source_unit(kData + "/java/user/User.java", UnitKind::kCodeUnderTest));
  auto test = read_source_unit(kData + "/java/user/UserTest.java", UnitKind::kTest);
  auto inputs = extract_test_inputs(test, sites);
  ASSERT_EQ(inputs.size(), 15u);
  EXPECT_EQ(inputs[6].literal_text, "\"|x45e*3q4+\"");
  EXPECT_EQ(inputs[6].value(), "|x45e*3q4+");
  EXPECT_EQ(inputs[7].value(), " [stream]");
  EXPECT_EQ(inputs[8].value(), "");
  for (int i = 0; i < 3; ++i) EXPECT_EQ(inputs[6 + i].site.param_index, i);
  EXPECT_EQ(inputs[6].test_id, "org.airsonic.player.domain.UserTest.test05");
  for (const auto& in : inputs) {
    EXPECT_EQ(in.origin, InputOrigin::kDirectLiteral);
    EXPECT_EQ(in.value_kind, TypeGroup::kString);
    EXPECT_EQ(test.text.substr(in.offset, in.literal_text.size()), in.literal_text);
  }
}

TEST(ExtractTestInputs, LocalVariableInitializedWithLiteral) {
  auto sites = extract_parameters(Cut("class User { User(String n, String p, String e) {} }"));
  auto inputs = extract_test_inputs(
      TestUnit("class T { void t() { String n = \"Simon\"; new User(n, \"s\", \"e@x.org\"); } }"), sites);
  ASSERT_EQ(inputs.size(), 3u);
  EXPECT_EQ(inputs[0].site.param_index, 0);
  EXPECT_EQ(inputs[0].origin, InputOrigin::kLocalVarLiteral);
  EXPECT_EQ(inputs[0].literal_text, "\"Simon\"");
  EXPECT_EQ(inputs[1].origin, InputOrigin::kDirectLiteral);
}

TEST(ExtractTestInputs, ReassignedLocalIsNoLongerALiteral) {
  auto sites = extract_parameters(Cut("class C { void f(String s) {} }"));
  auto inputs = extract_test_inputs(
      TestUnit("class T { void t() { String s = \"a\"; s = compute(); f(s); f(\"b\"); } }"), sites);
  ASSERT_EQ(inputs.size(), 1u);
  EXPECT_EQ(inputs[0].value(), "b");
}

TEST(ExtractTestInputs, FinalStaticFieldsOfTheTestClassOnly) {
  auto sites = extract_parameters(Cut("class C { void f(String s) {} }"));
  auto inputs = extract_test_inputs(TestUnit(R"(
    class T {
      static final String NAME = "Ada";
      static String MUTABLE = "m";
      void t() { f(NAME); f(T.NAME); f(OtherClass.FIELD); f(MUTABLE); f("a" + NAME); }
    })"), sites);
  ASSERT_EQ(inputs.size(), 2u);
  for (const auto& in : inputs) {
    EXPECT_EQ(in.origin, InputOrigin::kFinalStaticField);
    EXPECT_EQ(in.literal_text, "\"Ada\"");
  }
}

TEST(ExtractTestInputs, NumbersSignsAndOverloads) {
  auto sites = extract_parameters(
      Cut("class C { int or(int a, int b) { return a | b; } void f(String s) {} void f(long n) {} }"));
  auto test = TestUnit(R"(
    class T {
      void t() { assert 7 == or(4, -3); f(1234567890L); f("x"); f('c'); }
    })");
  auto inputs = extract_test_inputs(test, sites);
  ASSERT_EQ(inputs.size(), 4u);
  EXPECT_EQ(inputs[0].literal_text, "4");
  EXPECT_EQ(inputs[1].literal_text, "-3");
  EXPECT_EQ(inputs[2].literal_text, "1234567890L");
  EXPECT_EQ(inputs[2].site.method_sig, "f(long)");
  EXPECT_EQ(inputs[2].value_kind, TypeGroup::kNumber);
  EXPECT_EQ(inputs[3].site.method_sig, "f(String)");
  EXPECT_EQ(inputs[0].call_offset, inputs[1].call_offset);
}

TEST(ExtractTestInputs, WideningBindingIsAdmitted) {
  auto sites = extract_parameters(Cut("class C { void f(long n) {} }"));
  auto inputs = extract_test_inputs(TestUnit("class T { void t() { int k = 5; f(k); } }"), sites);
  ASSERT_EQ(inputs.size(), 1u);
  EXPECT_EQ(inputs[0].origin, InputOrigin::kLocalVarLiteral);
}

TEST(ExtractTestInputs, EveryLiteralOccursVerbatimInTheTestSource) {
  auto sites = extract_parameters(read_source_unit(kData + "/java/calc/Calc.java", UnitKind::kCodeUnderTest));
  auto test = read_source_unit(kData + "/java/calc/CalcTest.java", UnitKind::kTest);
  auto inputs = extract_test_inputs(test, sites);
  ASSERT_EQ(inputs.size(), 6u);
  for (const auto& in : inputs) {
    EXPECT_EQ(test.text.substr(in.offset, in.literal_text.size()), in.literal_text);
  }
  EXPECT_EQ(inputs[4].origin, InputOrigin::kLocalVarLiteral);
  EXPECT_EQ(inputs[5].origin, InputOrigin::kFinalStaticField);
  EXPECT_EQ(inputs[5].literal_text, "12");
}

TEST(JsonRecords, RoundTrip) {
  auto sites = extract_parameters(read_source_unit(kData + "/java/calc/Calc.java", UnitKind::kCodeUnderTest));
  for (const auto& s : sites) EXPECT_EQ(site_from_json(to_json(s)), s);
  auto inputs = extract_test_inputs(read_source_unit(kData + "/java/calc/CalcTest.java", UnitKind::kTest), sites);
  for (const auto& in : inputs) EXPECT_EQ(input_from_json(to_json(in)), in);
}

}  // namespace
}  // namespace c3
