// Copyright 2026 The colddiff Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cstdio>

#include "colddiff/metrics.hpp"

namespace colddiff {
namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string report_csv(const MetricReport& r) {
  std::string out = "id";
  for (const char* name : kMetricNames) out += std::string(",") + name;
  out += ",status,errors\n";
  for (const auto& row : r.rows) {
    out += csv_escape(row.id);
    for (const auto& v : row.values) out += "," + (v ? format_double(*v) : std::string());
    out += row.failed ? ",failed," : (row.errors.empty() ? ",ok," : ",partial,");
    std::string errs;
    for (const auto& e : row.errors) errs += (errs.empty() ? "" : "; ") + e;
    out += csv_escape(errs) + "\n";
  }
  return out;
}

nlohmann::json report_json(const MetricReport& r) {
  using nlohmann::json;
  json rows = json::array();
  for (const auto& row : r.rows) {
    json values = json::object();
    for (int m = 0; m < kMetricCount; ++m)
      values[kMetricNames[m]] = row.values[m] ? json(*row.values[m]) : json(nullptr);
    rows.push_back(json{{"id", row.id}, {"failed", row.failed}, {"errors", row.errors}, {"values", values}});
  }
  json agg = json::object();
  for (int m = 0; m < kMetricCount; ++m) {
    const auto& a = r.aggregates[m];
    agg[kMetricNames[m]] = json{{"count", a.count},
                                {"mean", a.count ? json(a.mean) : json(nullptr)},
                                {"std", a.count ? json(a.std) : json(nullptr)}};
  }
  return json{{"format", "colddiff-metric-report"},
              {"format_version", 1},
              {"examples", r.rows.size()},
              {"failed", r.failed},
              {"skipped", r.skipped},
              {"aggregates", agg},
              {"rows", rows},
              {"config", metric_config_to_json(r.config)}};
}

}  // namespace colddiff
