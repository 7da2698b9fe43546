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

// Evaluation metrics and report rendering.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "c3/code_model.hpp"
#include "c3/context_registry.hpp"
#include "c3/error.hpp"
#include "c3/fitness_search.hpp"
#include "c3/judge.hpp"
#include "c3/miner.hpp"

namespace c3 {

inline constexpr std::string_view kReportSchema = "c3.report/1";

// An exact ratio; undefined when the denominator is zero.
struct Ratio {
  std::uint64_t num = 0;
  std::uint64_t den = 0;

  bool defined() const { return den != 0; }
  std::optional<double> value() const {
    if (!defined()) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  }
  // Percentage rounded half-up to `decimals` places, trailing ".0" dropped;
  // "-" when undefined.
  std::string percent(int decimals = 0) const {
    if (!defined()) return "-";
    std::uint64_t scale = 100;
    for (int i = 0; i < decimals; ++i) scale *= 10;
    std::uint64_t scaled = (2 * num * scale + den) / (2 * den);
    std::uint64_t unit = scale / 100;
    std::string out = std::to_string(scaled / unit);
    if (unit > 1 && scaled % unit != 0) {
      std::string frac = std::to_string(scaled % unit);
      frac.insert(0, std::to_string(unit).size() - 1 - frac.size(), '0');
      while (!frac.empty() && frac.back() == '0') frac.pop_back();
      out += "." + frac;
    }
    return out + "%";
  }
  friend bool operator==(const Ratio&, const Ratio&) = default;
};

// ---- accuracy ----------------------------------------------------------------

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

struct ConfusionMetrics {
  Ratio precision;
  Ratio recall;
  Ratio f1;  // 2PR/(P+R) = 2TP/(2TP+FP+FN)
};

inline ConfusionMetrics confusion_metrics(const ConfusionCounts& c) {
  ConfusionMetrics m;
  m.precision = {c.tp, c.tp + c.fp};
  m.recall = {c.tp, c.tp + c.fn};
  if (m.precision.defined() && m.recall.defined()) m.f1 = {2 * c.tp, 2 * c.tp + c.fp + c.fn};
  return m;
}

// ---- readability -------------------------------------------------------------

struct ReadabilityRow {
  std::string project;  // "Total" on totals rows
  std::string group;    // STRING, NUMBER or ALL
  std::uint64_t contexted = 0;
  std::uint64_t covered = 0;
  std::uint64_t readable = 0;

  Ratio covered_rate() const { return {covered, contexted}; }
  Ratio readable_rate() const { return {readable, covered}; }
  friend bool operator==(const ReadabilityRow&, const ReadabilityRow&) = default;
};

struct ReadabilityReport {
  std::vector<ReadabilityRow> rows;    // per (project, group)
  std::vector<ReadabilityRow> totals;  // per group across projects, then ALL
  friend bool operator==(const ReadabilityReport&, const ReadabilityReport&) = default;
};

struct Grouping {
  bool by_project = true;
};

inline ReadabilityReport aggregate_readability(const std::vector<Judgment>& judgments,
                                               const std::vector<MiningResult>& mined, Grouping grouping = {}) {
  struct SiteState {
    std::string project;
    TypeGroup group;
    bool covered = false;
    bool readable = false;
  };
  std::map<SiteKey, SiteState> sites;
  std::set<std::string> projects;
  for (const auto& m : mined) {
    if (m.outcome.is_misc()) continue;
    std::string project = grouping.by_project ? m.project : "all";
    projects.insert(project);
    sites[m.site.key()] = {project, m.site.group()};
  }
  for (const auto& j : judgments) {
    auto it = sites.find(j.input.site);
    if (it == sites.end()) {
      throw Error(ErrorKind::kInvalidArgument, "judgment of " + j.input.test_id + " references unmined site " +
                                                   j.input.site.to_string());
    }
    it->second.covered = true;
    it->second.readable = it->second.readable || j.readable;
  }
  ReadabilityReport report;
  std::map<std::pair<std::string, TypeGroup>, ReadabilityRow> cells;
  for (const auto& p : projects)
    for (TypeGroup g : {TypeGroup::kString, TypeGroup::kNumber})
      cells[{p, g}] = {p, std::string(to_string(g)), 0, 0, 0};
  ReadabilityRow total_string{"Total", "STRING"};
  ReadabilityRow total_number{"Total", "NUMBER"};
  ReadabilityRow total_all{"Total", "ALL"};
  for (const auto& [key, s] : sites) {
    auto& row = cells[{s.project, s.group}];
    auto& total = s.group == TypeGroup::kString ? total_string : total_number;
    for (ReadabilityRow* r : {&row, &total, &total_all}) {
      r->contexted += 1;
      r->covered += s.covered ? 1 : 0;
      r->readable += s.readable ? 1 : 0;
    }
  }
  for (auto& [key, row] : cells) report.rows.push_back(row);
  report.totals = {total_string, total_number, total_all};
  return report;
}

// ---- goal coverage -----------------------------------------------------------

struct GoalCoverage {
  std::string class_id;
  std::string method_sig;
  Ratio c3;
  Ratio c3invo;
  friend bool operator==(const GoalCoverage&, const GoalCoverage&) = default;
};

inline GoalCoverage goal_coverage(const SynthesisResult& result) {
  GoalCoverage g{result.class_id, result.method_sig, {}, {}};
  for (const auto& o : result.goals) {
    Ratio& r = o.goal.kind == GoalKind::kParam ? g.c3 : g.c3invo;
    r.den += 1;
    r.num += o.covered ? 1 : 0;
  }
  return g;
}

// ---- rendering ---------------------------------------------------------------

struct Report {
  std::optional<ConfusionCounts> confusion;
  std::optional<ReadabilityReport> readability;
  std::vector<GoalCoverage> coverage;
};

inline bool operator==(const Report& a, const Report& b) {
  return a.confusion == b.confusion && a.readability == b.readability && a.coverage == b.coverage;
}

enum class ReportFormat { kJson, kCsv, kMarkdown };

inline ReportFormat parse_report_format(std::string_view s) {
  std::string u = text::upper(s);
  if (u == "JSON") return ReportFormat::kJson;
  if (u == "CSV") return ReportFormat::kCsv;
  if (u == "MARKDOWN" || u == "MD") return ReportFormat::kMarkdown;
  throw Error(ErrorKind::kInvalidArgument, "unknown report format '" + std::string(s) + "' (JSON, CSV, MARKDOWN)");
}

namespace detail {

inline nlohmann::json ratio_json(const Ratio& r, int decimals) {
  return {{"num", r.num}, {"den", r.den}, {"percent", r.percent(decimals)}};
}

inline Ratio ratio_from_json(const nlohmann::json& j) {
  return {j.at("num").get<std::uint64_t>(), j.at("den").get<std::uint64_t>()};
}

inline nlohmann::json row_json(const ReadabilityRow& r) {
  return {{"project", r.project},
          {"group", r.group},
          {"contexted", r.contexted},
          {"covered", r.covered},
          {"covered_rate", r.covered_rate().percent()},
          {"readable", r.readable},
          {"readable_rate", r.readable_rate().percent()}};
}

inline ReadabilityRow row_from_json(const nlohmann::json& j) {
  return {j.at("project").get<std::string>(), j.at("group").get<std::string>(), j.at("contexted").get<std::uint64_t>(),
          j.at("covered").get<std::uint64_t>(), j.at("readable").get<std::uint64_t>()};
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

inline std::string count_with_rate(std::uint64_t n, const Ratio& r) {
  return std::to_string(n) + " (" + r.percent() + ")";
}

}  // namespace detail

inline nlohmann::json report_to_json(const Report& report) {
  nlohmann::json j{{"schema", kReportSchema}};
  if (report.confusion) {
    const auto& c = *report.confusion;
    auto m = confusion_metrics(c);
    j["accuracy"] = {{"tp", c.tp},
                     {"fp", c.fp},
                     {"tn", c.tn},
                     {"fn", c.fn},
                     {"precision", detail::ratio_json(m.precision, 1)},
                     {"recall", detail::ratio_json(m.recall, 1)},
                     {"f1", detail::ratio_json(m.f1, 1)}};
  }
  if (report.readability) {
    nlohmann::json rows = nlohmann::json::array();
    nlohmann::json totals = nlohmann::json::array();
    for (const auto& r : report.readability->rows) rows.push_back(detail::row_json(r));
    for (const auto& r : report.readability->totals) totals.push_back(detail::row_json(r));
    j["readability"] = {{"rows", rows}, {"totals", totals}};
  }
  if (!report.coverage.empty()) {
    nlohmann::json cov = nlohmann::json::array();
    for (const auto& g : report.coverage) {
      cov.push_back({{"class_id", g.class_id},
                     {"method_sig", g.method_sig},
                     {"c3", detail::ratio_json(g.c3, 0)},
                     {"c3invo", detail::ratio_json(g.c3invo, 0)}});
    }
    j["goal_coverage"] = cov;
  }
  return j;
}

inline Report report_from_json(const nlohmann::json& j) {
  if (j.value("schema", std::string()) != kReportSchema) {
    throw Error(ErrorKind::kParse, "unsupported report schema '" + j.value("schema", std::string()) + "'");
  }
  try {
    Report r;
    if (j.contains("accuracy")) {
      const auto& a = j["accuracy"];
      r.confusion = ConfusionCounts{a.at("tp").get<std::uint64_t>(), a.at("fp").get<std::uint64_t>(),
                                    a.at("tn").get<std::uint64_t>(), a.at("fn").get<std::uint64_t>()};
    }
    if (j.contains("readability")) {
      ReadabilityReport rr;
      for (const auto& x : j["readability"].at("rows")) rr.rows.push_back(detail::row_from_json(x));
      for (const auto& x : j["readability"].at("totals")) rr.totals.push_back(detail::row_from_json(x));
      r.readability = rr;
    }
    if (j.contains("goal_coverage")) {
      for (const auto& x : j["goal_coverage"]) {
        r.coverage.push_back({x.at("class_id").get<std::string>(), x.at("method_sig").get<std::string>(),
                              detail::ratio_from_json(x.at("c3")), detail::ratio_from_json(x.at("c3invo"))});
      }
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("malformed report: ") + e.what());
  }
}

inline std::string render_report(const Report& report, ReportFormat format) {
  std::ostringstream out;
  switch (format) {
    case ReportFormat::kJson:
      return report_to_json(report).dump(2) + "\n";

    case ReportFormat::kCsv: {
      out << "section,subject,metric,value\n";
      auto row = [&](const std::string& section, const std::string& subject, const std::string& metric,
                     const std::string& value) {
        out << section << ',' << detail::csv_field(subject) << ',' << metric << ',' << detail::csv_field(value) << '\n';
      };
      if (report.confusion) {
        const auto& c = *report.confusion;
        auto m = confusion_metrics(c);
        row("accuracy", "all", "tp", std::to_string(c.tp));
        row("accuracy", "all", "fp", std::to_string(c.fp));
        row("accuracy", "all", "tn", std::to_string(c.tn));
        row("accuracy", "all", "fn", std::to_string(c.fn));
        row("accuracy", "all", "precision", m.precision.percent(1));
        row("accuracy", "all", "recall", m.recall.percent(1));
        row("accuracy", "all", "f1", m.f1.percent(1));
      }
      if (report.readability) {
        std::vector<ReadabilityRow> all = report.readability->rows;
        all.insert(all.end(), report.readability->totals.begin(), report.readability->totals.end());
        for (const auto& r : all) {
          std::string subject = r.project + "/" + r.group;
          row("readability", subject, "contexted", std::to_string(r.contexted));
          row("readability", subject, "covered", std::to_string(r.covered));
          row("readability", subject, "covered_rate", r.covered_rate().percent());
          row("readability", subject, "readable", std::to_string(r.readable));
          row("readability", subject, "readable_rate", r.readable_rate().percent());
        }
      }
      for (const auto& g : report.coverage) {
        std::string subject = g.class_id + "." + g.method_sig;
        row("goal_coverage", subject, "c3", g.c3.percent());
        row("goal_coverage", subject, "c3invo", g.c3invo.percent());
      }
      return out.str();
    }

    case ReportFormat::kMarkdown: {
      if (report.confusion) {
        const auto& c = *report.confusion;
        auto m = confusion_metrics(c);
        out << "## Mining accuracy\n\n"
            << "| TP | FP | FN | Precision | Recall | F1 |\n"
            << "|---:|---:|---:|---:|---:|---:|\n"
            << "| " << c.tp << " | " << c.fp << " | " << c.fn << " | " << m.precision.percent(1) << " | "
            << m.recall.percent(1) << " | " << m.f1.percent(1) << " |\n\n";
      }
      if (report.readability) {
        out << "## Readability\n\n"
            << "| Project | Group | Contexted | Covered | Readable |\n"
            << "|---|---|---:|---:|---:|\n";
        auto line = [&](const ReadabilityRow& r) {
          out << "| " << r.project << " | " << r.group << " | " << r.contexted << " | "
              << detail::count_with_rate(r.covered, r.covered_rate()) << " | "
              << detail::count_with_rate(r.readable, r.readable_rate()) << " |\n";
        };
        for (const auto& r : report.readability->rows) line(r);
        for (const auto& r : report.readability->totals) line(r);
        out << "\n";
      }
      if (!report.coverage.empty()) {
        out << "## Goal coverage\n\n"
            << "| Method | C3 | C3invo |\n"
            << "|---|---:|---:|\n";
        for (const auto& g : report.coverage) {
          auto cell = [](const Ratio& r) {
            return r.defined() ? std::to_string(r.num) + "/" + std::to_string(r.den) + " (" + r.percent() + ")"
                               : std::string("-");
          };
          out << "| " << g.class_id << "." << g.method_sig << " | " << cell(g.c3) << " | " << cell(g.c3invo) << " |\n";
        }
        out << "\n";
      }
      return out.str();
    }
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown report format");
}

}  // namespace c3
