// Acceptance run: one PASS/FAIL line per criterion. Every bound comes from the
// tolerance table through the suite and convergence modules.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "gravitensor/harness/report.hpp"

using namespace gravitensor;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

CaseConfig make(const std::string& name, int order, double mass = 1.0) {
  CaseConfig cfg;
  cfg.case_name = name;
  cfg.stencil_order = order;
  cfg.mass = mass;
  return cfg;
}

std::string key(const CaseConfig& c) {
  return c.case_name + "/o" + std::to_string(c.resolved_order()) + "/m" + std::to_string(c.mass);
}

class Runs {
 public:
  const IdentityReport& suite(const CaseConfig& c) {
    auto it = suites_.find(key(c));
    if (it == suites_.end()) it = suites_.emplace(key(c), run_suite(c)).first;
    return it->second;
  }
  const ConvergenceReport& convergence(const CaseConfig& c) {
    auto it = conv_.find(key(c));
    if (it == conv_.end()) it = conv_.emplace(key(c), convergence_study(c, c.levels)).first;
    return it->second;
  }

 private:
  std::map<std::string, IdentityReport> suites_;
  std::map<std::string, ConvergenceReport> conv_;
};

void require_check(Outcome& o, const IdentityReport& r, const std::string& name) {
  const auto* c = r.find(name);
  if (!c) return o.fail(name + " missing on " + r.config.case_name);
  if (!c->pass) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s on %s: %.3e > %.3e", name.c_str(), r.config.case_name.c_str(), c->measured,
                  c->tolerance);
    o.fail(buf);
  }
}

void require_order(Outcome& o, const ConvergenceReport& r, const std::string& name) {
  const auto* e = r.find(name);
  if (!e) return o.fail(name + " missing on " + r.config.case_name);
  if (e->excluded || e->pass) return;
  char buf[200];
  std::snprintf(buf, sizeof buf, "%s on %s order %d: measured %.2f%s", name.c_str(), r.config.case_name.c_str(),
                r.order, e->orders.empty() ? 0.0 : e->orders.back(), e->monotone ? "" : " (not monotone)");
  o.fail(buf);
}

void require_prefix(Outcome& o, const IdentityReport& r, const std::string& prefix, std::size_t min_count) {
  std::size_t n = 0;
  for (const auto& c : r.checks)
    if (c.name.rfind(prefix, 0) == 0) {
      ++n;
      require_check(o, r, c.name);
    }
  if (n < min_count) o.fail(prefix + "* checks missing on " + r.config.case_name);
}

const std::vector<std::string> kMetricCases{"weakfield", "conformal", "random_smooth"};

}  // namespace

int main() {
  Runs runs;
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria;

  criteria.emplace_back("flat space gives exact zeros within 5 s", [&] {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const auto& r = runs.suite(make("flat", 2));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (const auto& c : r.checks) require_check(o, r, c.name);
    const auto* fa = r.find("flat_annihilation");
    if (!fa || fa->measured != 0.0) o.fail("derived quantities not exactly zero");
    if (secs >= 5.0) o.fail("runtime " + std::to_string(secs) + " s");
    if (o.pass) o.detail = std::to_string(r.checks.size()) + " checks, " + std::to_string(secs) + " s";
    return o;
  });

  criteria.emplace_back("density decomposition converges at orders 2 and 4", [&] {
    Outcome o;
    for (int order : {2, 4})
      for (const auto& name : kMetricCases) {
        require_order(o, runs.convergence(make(name, order)), "density_decomposition");
        require_check(o, runs.suite(make(name, order)), "density_decomposition");
      }
    return o;
  });

  criteria.emplace_back("gravitational energy identity holds and converges", [&] {
    Outcome o;
    for (int order : {2, 4})
      for (const auto& name : kMetricCases) {
        const auto cfg = make(name, order);
        require_order(o, runs.convergence(cfg), "grav_energy_identity");
        require_check(o, runs.suite(cfg), "grav_energy_identity");
        require_check(o, runs.suite(cfg), "grav_energy_identity_engine");
      }
    const auto* f = runs.suite(make("flat", 2)).find("grav_energy_identity");
    if (!f || *f->linf != 0.0) o.fail("flat residual not exactly zero");
    return o;
  });

  criteria.emplace_back("Bianchi identities converge and both forms agree", [&] {
    Outcome o;
    for (int order : {2, 4})
      for (const auto& name : kMetricCases) {
        const auto cfg = make(name, order);
        require_order(o, runs.convergence(cfg), "contracted_bianchi");
        require_order(o, runs.convergence(cfg), "grav_bianchi");
        require_check(o, runs.suite(cfg), "bianchi_forms_agree");
      }
    return o;
  });

  criteria.emplace_back("derivative oracles agree on every case", [&] {
    Outcome o;
    for (const auto& name : case_names())
      for (int order : {2, 4}) require_prefix(o, runs.suite(make(name, order)), "oracle_", 3);
    return o;
  });

  criteria.emplace_back("matter and total identities converge for m = 0 and m = 1", [&] {
    Outcome o;
    for (double mass : {0.0, 1.0})
      for (int order : {2, 4}) {
        const auto& conv = runs.convergence(make("vector_matter", order, mass));
        std::size_t n = 0;
        for (const auto& e : conv.entries)
          if (e.group == "matter" || e.group == "total") {
            ++n;
            require_order(o, conv, e.name);
          }
        if (n == 0) o.fail("no matter entries");
        require_prefix(o, runs.suite(make("vector_matter", order, mass)), "matter_", 5);
        require_prefix(o, runs.suite(make("vector_matter", order, mass)), "total_", 3);
      }
    return o;
  });

  criteria.emplace_back("on-shell recombinations are exact to rounding", [&] {
    Outcome o;
    for (const auto& name : {"flat", "vector_matter", "gauge_experiment"})
      for (int order : {2, 4}) require_prefix(o, runs.suite(make(name, order)), "recombination_", 7);
    return o;
  });

  criteria.emplace_back("gauge variation: action, E_0 and identity scaling", [&] {
    Outcome o;
    CaseConfig cfg;
    cfg.case_name = "gauge_experiment";
    const auto& r = runs.suite(cfg);
    for (const char* name : {"gauge_action_exponent", "gauge_e0_exponent", "gauge_identity_ratio"})
      require_check(o, r, name);
    if (o.pass && r.gauge) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "action p = %.3f, E_0 p = %.3f, ratio %.3f", r.gauge->action_exponent,
                    r.gauge->e0_exponent, r.gauge->max_identity_ratio);
      o.detail = buf;
    }
    return o;
  });

  criteria.emplace_back("representations of the K density agree to rounding", [&] {
    Outcome o;
    for (const auto& name : case_names())
      for (int order : {2, 4}) require_prefix(o, runs.suite(make(name, order)), "rep_", 6);
    return o;
  });

  criteria.emplace_back("reports are byte-identical across runs", [&] {
    Outcome o;
    for (const auto& name : {"random_smooth", "vector_matter"}) {
      auto cfg = make(name, 2);
      cfg.n = 16;
      cfg.levels = {16, 32};
      const auto s1 = run_suite(cfg), s2 = run_suite(cfg);
      const auto c1 = convergence_study(cfg, cfg.levels), c2 = convergence_study(cfg, cfg.levels);
      if (report_json("report", cfg, &s1, &c1) != report_json("report", cfg, &s2, &c2))
        o.fail(std::string("JSON differs on ") + name);
      if (report_text("report", cfg, &s1, &c1) != report_text("report", cfg, &s2, &c2))
        o.fail(std::string("text differs on ") + name);
    }
    return o;
  });

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.fail(std::string("error: ") + e.what());
    }
    std::printf("%s %2zu %s%s%s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.empty() ? "" : " | ", o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
