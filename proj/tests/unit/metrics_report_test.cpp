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

#include "c3/metrics_report.hpp"

#include <random>
#include <string>

#include "gtest/gtest.h"

namespace c3 {
namespace {

MiningResult MinedSite(int index, TypeGroup group, const std::string& project = "p") {
  MiningResult m;
  m.site.class_id = "demo.C";
  m.site.method_sig = "f(String)";
  m.site.param_index = index;
  m.site.declared_type = group == TypeGroup::kString ? DeclaredType::kString : DeclaredType::kInt;
  m.outcome.context = group == TypeGroup::kString ? "PERSON" : "BINARY";
  m.project = project;
  return m;
}

Judgment JudgedInput(const MiningResult& m, bool readable) {
  Judgment j;
  j.input.site = m.site.key();
  j.input.test_id = "demo.CTest.t";
  j.readable = readable;
  return j;
}

TEST(ConfusionMetrics, MiningAccuracyTable) {
  auto m = confusion_metrics({864, 160, 0, 177});
  EXPECT_NEAR(*m.precision.value(), 0.844, 0.0005);
  EXPECT_NEAR(*m.recall.value(), 0.830, 0.0005);
  EXPECT_NEAR(*m.f1.value(), 0.837, 0.0005);
  EXPECT_EQ(m.precision.percent(1), "84.4%");
  EXPECT_EQ(m.recall.percent(1), "83%");
  EXPECT_EQ(m.f1.percent(1), "83.7%");
}

TEST(ConfusionMetrics, EdgeCases) {
  auto perfect = confusion_metrics({10, 0, 0, 0});
  EXPECT_EQ(*perfect.precision.value(), 1.0);
  EXPECT_EQ(*perfect.recall.value(), 1.0);
  EXPECT_EQ(*perfect.f1.value(), 1.0);
  auto none = confusion_metrics({0, 0, 5, 0});
  EXPECT_FALSE(none.precision.defined());
  EXPECT_FALSE(none.recall.defined());
  EXPECT_FALSE(none.f1.defined());
  EXPECT_EQ(none.precision.percent(1), "-");
}

TEST(ConfusionMetrics, F1IsTheHarmonicMean) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 2000; ++i) {
    ConfusionCounts c{1 + rng() % 1000, rng() % 1000, rng() % 1000, rng() % 1000};
    auto m = confusion_metrics(c);
    double p = *m.precision.value();
    double r = *m.recall.value();
    EXPECT_NEAR(*m.f1.value(), 2 * p * r / (p + r), 1e-12);
    EXPECT_LE(std::min(p, r), *m.f1.value() + 1e-12);
    EXPECT_GE(std::max(p, r), *m.f1.value() - 1e-12);
  }
}

TEST(Ratio, RoundsHalfUp) {
  EXPECT_EQ((Ratio{1, 8}).percent(), "13%");
  EXPECT_EQ((Ratio{1, 8}).percent(1), "12.5%");
  EXPECT_EQ((Ratio{1, 200}).percent(), "1%");
  EXPECT_EQ((Ratio{1, 3}).percent(2), "33.33%");
  EXPECT_EQ((Ratio{1, 20}).percent(2), "5%");
  EXPECT_EQ((Ratio{0, 0}).percent(), "-");
}

TEST(AggregateReadability, StringTotalsRow) {
  std::vector<MiningResult> mined;
  std::vector<Judgment> judged;
  for (int i = 0; i < 91; ++i) {
    mined.push_back(MinedSite(i, TypeGroup::kString));
    if (i < 87) judged.push_back(JudgedInput(mined.back(), i < 78));
    if (i < 87) judged.push_back(JudgedInput(mined.back(), false));
  }
  auto report = aggregate_readability(judged, mined);
  const auto& total = report.totals[0];
  EXPECT_EQ(total.group, "STRING");
  EXPECT_EQ(total.covered, 87u);
  EXPECT_EQ(total.covered_rate().percent(), "96%");
  EXPECT_EQ(total.readable, 78u);
  EXPECT_EQ(total.readable_rate().percent(), "90%");
  EXPECT_EQ(report.totals[1].readable_rate().percent(), "-");
}

TEST(AggregateReadability, SingleSiteAndEmpty) {
  std::vector<MiningResult> mined = {MinedSite(0, TypeGroup::kNumber, "calc")};
  auto report = aggregate_readability({JudgedInput(mined[0], true)}, mined);
  ASSERT_EQ(report.rows.size(), 2u);
  EXPECT_EQ(report.rows[0].group, "STRING");
  EXPECT_EQ(report.rows[1].readable, 1u);
  EXPECT_EQ(report.rows[1].readable_rate().percent(), "100%");
  auto empty = aggregate_readability({}, {});
  EXPECT_TRUE(empty.rows.empty());
  EXPECT_EQ(empty.totals[2].contexted, 0u);

  MiningResult other = MinedSite(5, TypeGroup::kString);
  EXPECT_THROW(aggregate_readability({JudgedInput(other, true)}, mined), Error);
}

TEST(AggregateReadability, AddingAReadableJudgmentNeverLowersTheCount) {
  std::mt19937_64 rng(1);
  std::vector<MiningResult> mined;
  for (int i = 0; i < 20; ++i) mined.push_back(MinedSite(i, i % 3 ? TypeGroup::kString : TypeGroup::kNumber));
  std::vector<Judgment> judged;
  std::uint64_t previous = 0;
  for (int i = 0; i < 100; ++i) {
    judged.push_back(JudgedInput(mined[rng() % mined.size()], rng() % 2 == 0));
    auto now = aggregate_readability(judged, mined).totals[2].readable;
    EXPECT_GE(now, previous);
    previous = now;
  }
}

TEST(GoalCoverage, PerKindRatios) {
  SynthesisResult r;
  auto goal = [](GoalKind k, bool covered) {
    GoalOutcome o;
    o.goal.kind = k;
    o.covered = covered;
    return o;
  };
  r.goals = {goal(GoalKind::kParam, true), goal(GoalKind::kParam, true), goal(GoalKind::kInvocation, false)};
  auto g = goal_coverage(r);
  EXPECT_EQ(g.c3.percent(), "100%");
  EXPECT_EQ(g.c3invo.percent(), "0%");
  r.goals.pop_back();
  EXPECT_EQ(goal_coverage(r).c3invo.percent(), "-");
}

TEST(RenderReport, Formats) {
  Report report;
  report.confusion = ConfusionCounts{864, 160, 0, 177};
  std::string md = render_report(report, ReportFormat::kMarkdown);
  EXPECT_NE(md.find("| 84.4% | 83% | 83.7% |"), std::string::npos);

  EXPECT_EQ(render_report(Report{}, ReportFormat::kCsv), "section,subject,metric,value\n");
  std::string csv = render_report(report, ReportFormat::kCsv);
  EXPECT_NE(csv.find("accuracy,all,recall,83%\n"), std::string::npos);

  std::vector<MiningResult> mined = {MinedSite(0, TypeGroup::kString, "a,b"), MinedSite(1, TypeGroup::kNumber)};
  report.readability = aggregate_readability({JudgedInput(mined[0], true)}, mined);
  SynthesisResult s;
  s.class_id = "demo.C";
  s.method_sig = "f(String)";
  s.goals.push_back(GoalOutcome{});
  s.goals.back().covered = true;
  report.coverage.push_back(goal_coverage(s));
  EXPECT_NE(render_report(report, ReportFormat::kCsv).find("\"a,b/STRING\""), std::string::npos);
  EXPECT_NE(render_report(report, ReportFormat::kMarkdown).find("| demo.C.f(String) | 1/1 (100%) | - |"),
            std::string::npos);

  Report back = report_from_json(nlohmann::json::parse(render_report(report, ReportFormat::kJson)));
  EXPECT_TRUE(back == report);
  EXPECT_EQ(render_report(back, ReportFormat::kMarkdown), render_report(report, ReportFormat::kMarkdown));
  EXPECT_THROW(parse_report_format("xml"), Error);
  EXPECT_EQ(parse_report_format("markdown"), ReportFormat::kMarkdown);
}

}  // namespace
}  // namespace c3
