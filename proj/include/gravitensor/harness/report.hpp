#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "gravitensor/harness/convergence.hpp"
#include "gravitensor/harness/suite.hpp"

namespace gravitensor {

inline constexpr const char* kReportSchema = "gravitensor-report/1";

enum class ReportFormat { Json, Text };

inline ReportFormat parse_format(const std::string& s) {
  if (s == "json") return ReportFormat::Json;
  if (s == "text") return ReportFormat::Text;
  throw ConfigError("format must be json or text, got '" + s + "'");
}

namespace detail {

using ojson = nlohmann::ordered_json;

inline ojson opt_number(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

inline ojson check_json(const CheckResult& c) {
  ojson j;
  j["name"] = c.name;
  j["group"] = c.group;
  j["anchor"] = c.anchor;
  j["kind"] = kind_name(c.kind);
  j["linf"] = opt_number(c.linf);
  j["rms"] = opt_number(c.rms);
  j["scale"] = opt_number(c.scale);
  j["relative"] = c.measured;
  j["tolerance"] = c.tolerance;
  j["pass"] = c.pass;
  j["note"] = c.note;
  return j;
}

inline ojson suite_json(const IdentityReport& r) {
  ojson j;
  j["grid"] = {{"sizes", r.sizes}, {"order", r.order}, {"h", r.spacing}};
  j["summary"] = {{"checks", r.checks.size()}, {"passed", r.passed()}, {"failed", r.checks.size() - r.passed()},
                  {"pass", r.all_pass()}};
  ojson checks = ojson::array();
  for (const auto& c : r.checks) checks.push_back(check_json(c));
  j["checks"] = std::move(checks);
  if (r.gauge) {
    ojson steps = ojson::array();
    for (const auto& s : r.gauge->steps)
      steps.push_back({{"eps", s.epsilon}, {"action_change", s.action_change}, {"e0_change", s.e0_change}});
    j["gauge"] = {{"steps", std::move(steps)},
                  {"action_exponent", r.gauge->action_exponent},
                  {"e0_exponent", r.gauge->e0_exponent},
                  {"max_identity_ratio", r.gauge->max_identity_ratio}};
  }
  return j;
}

inline ojson convergence_json(const ConvergenceReport& r) {
  ojson j;
  j["levels"] = r.levels;
  j["expected_order"] = r.order;
  std::size_t eligible = 0, passed = 0;
  ojson entries = ojson::array();
  for (const auto& e : r.entries) {
    if (!e.excluded) {
      ++eligible;
      passed += e.pass ? 1 : 0;
    }
    ojson x;
    x["name"] = e.name;
    x["group"] = e.group;
    x["anchor"] = e.anchor;
    x["linf"] = e.linf;
    x["relative"] = e.relative;
    x["orders"] = e.orders;
    x["excluded"] = e.excluded;
    x["monotone"] = e.monotone;
    x["pass"] = e.excluded ? ojson(nullptr) : ojson(e.pass);
    x["note"] = e.note;
    entries.push_back(std::move(x));
  }
  j["summary"] = {{"eligible", eligible}, {"passed", passed}, {"pass", r.all_pass()}};
  j["entries"] = std::move(entries);
  return j;
}

}  // namespace detail

/// Report document; either part may be absent. Key order is fixed, so
/// identical inputs give identical bytes. `timestamp` is opt-in.
inline std::string report_json(const std::string& command, const CaseConfig& cfg, const IdentityReport* suite,
                               const ConvergenceReport* conv, const std::optional<std::string>& timestamp = {}) {
  detail::ojson j;
  j["schema"] = kReportSchema;
  j["command"] = command;
  if (timestamp) j["generated_at"] = *timestamp;
  j["config"] = config_to_json(cfg);
  bool pass = true;
  if (suite) {
    j["suite"] = detail::suite_json(*suite);
    pass = pass && suite->all_pass();
  }
  if (conv) {
    j["convergence"] = detail::convergence_json(*conv);
    pass = pass && conv->all_pass();
  }
  j["pass"] = pass;
  return j.dump(2) + "\n";
}

inline std::string report_text(const std::string& command, const CaseConfig& cfg, const IdentityReport* suite,
                               const ConvergenceReport* conv) {
  std::ostringstream out;
  char line[512];
  out << "gravitensor " << command << ": case " << cfg.case_name << "\n";
  if (suite) {
    std::snprintf(line, sizeof line, "grid %dx%dx%dx%d  order %d  h %.4g\n", suite->sizes[0], suite->sizes[1],
                  suite->sizes[2], suite->sizes[3], suite->order, suite->spacing);
    out << line;
    std::snprintf(line, sizeof line, "%-34s %-14s %-12s %12s %12s  %s\n", "check", "group", "kind", "value",
                  "tolerance", "result");
    out << line;
    for (const auto& c : suite->checks) {
      std::snprintf(line, sizeof line, "%-34s %-14s %-12s %12.4e %12.4e  %s%s%s\n", c.name.c_str(), c.group.c_str(),
                    kind_name(c.kind), c.measured, c.tolerance, c.pass ? "PASS" : "FAIL",
                    c.note.empty() ? "" : "  ", c.note.c_str());
      out << line;
    }
    std::snprintf(line, sizeof line, "%zu/%zu checks passed\n", suite->passed(), suite->checks.size());
    out << line;
  }
  if (conv) {
    out << "convergence over levels";
    for (int n : conv->levels) out << " " << n;
    out << ", expected order " << conv->order << "\n";
    for (const auto& e : conv->entries) {
      std::snprintf(line, sizeof line, "%-34s", e.name.c_str());
      out << line;
      for (double r : e.relative) {
        std::snprintf(line, sizeof line, " %10.3e", r);
        out << line;
      }
      if (e.excluded) {
        out << "  " << e.note << "\n";
        continue;
      }
      out << "  p =";
      for (double p : e.orders) {
        std::snprintf(line, sizeof line, " %.2f", p);
        out << line;
      }
      out << "  " << (e.pass ? "PASS" : "FAIL");
      if (!e.note.empty()) out << "  " << e.note;
      out << "\n";
    }
  }
  return out.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open report file " + path);
  f << content;
  if (!f) throw Error("failed writing report file " + path);
}

}  // namespace gravitensor
