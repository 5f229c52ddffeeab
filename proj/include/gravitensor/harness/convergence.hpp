#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "gravitensor/harness/suite.hpp"

namespace gravitensor {

/// Finest-level relative residual below which a check counts as exactly zero.
inline constexpr double kExactZeroFloor = 1e-12;

struct ConvergenceEntry {
  std::string name;
  std::string group;
  std::string anchor;
  std::vector<double> linf;      // residual per level
  std::vector<double> relative;  // relative residual per level
  std::vector<double> orders;    // log2(r_h / r_{h/2}) per refinement
  int expected = 2;
  bool excluded = false;
  bool monotone = true;
  bool pass = false;
  std::string note;
};

struct ConvergenceReport {
  CaseConfig config;
  std::vector<int> levels;
  int order = 2;
  std::vector<ConvergenceEntry> entries;

  bool all_pass() const {
    for (const auto& e : entries)
      if (!e.excluded && !e.pass) return false;
    return true;
  }
  const ConvergenceEntry* find(const std::string& name) const {
    for (const auto& e : entries)
      if (e.name == name) return &e;
    return nullptr;
  }
};

inline void validate_levels(const std::vector<int>& levels) {
  if (levels.size() < 2) throw ConfigError("a convergence study needs at least two levels");
  for (std::size_t i = 1; i < levels.size(); ++i)
    if (levels[i] != 2 * levels[i - 1]) throw ConfigError("each level must double the previous one");
}

/// Runs the truncation-order checks at every level and measures the order
/// from successive halvings of h. The pass decision uses the finest pair.
inline ConvergenceReport convergence_study(const CaseConfig& cfg, const std::vector<int>& levels) {
  validate_levels(levels);
  ConvergenceReport rep;
  rep.config = cfg;
  rep.levels = levels;
  rep.order = cfg.resolved_order();
  std::vector<IdentityReport> runs;
  for (int n : levels) runs.push_back(run_suite(cfg, n, {.identities = true, .oracles = false, .gauge = false}));

  for (const auto& c : runs.front().checks) {
    if (c.kind != CheckKind::Truncation || !c.linf) continue;
    ConvergenceEntry e;
    e.name = c.name;
    e.group = c.group;
    e.anchor = c.anchor;
    e.expected = rep.order;
    for (const auto& r : runs) {
      const auto* x = r.find(c.name);
      if (!x) throw Error("check '" + c.name + "' missing at a convergence level");
      e.linf.push_back(*x->linf);
      e.relative.push_back(x->measured);
    }
    if (e.relative.back() <= kExactZeroFloor) {
      e.excluded = true;
      e.note = "exact-zero, order undefined";
      rep.entries.push_back(std::move(e));
      continue;
    }
    for (std::size_t i = 1; i < e.linf.size(); ++i) {
      e.orders.push_back(std::log2(e.linf[i - 1] / e.linf[i]));
      e.monotone = e.monotone && e.linf[i] < e.linf[i - 1];
    }
    e.pass = e.monotone && std::abs(e.orders.back() - e.expected) <= 0.5;
    if (!e.monotone) e.note = "residual not monotone across levels";
    rep.entries.push_back(std::move(e));
  }
  return rep;
}

}  // namespace gravitensor
