#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gravitensor/error.hpp"
#include "gravitensor/matter_sector.hpp"

namespace gravitensor {

class ConfigError : public Error {
 public:
  using Error::Error;
};

inline const std::vector<std::string>& case_names() {
  static const std::vector<std::string> names{"flat",          "weakfield",     "conformal",
                                              "random_smooth", "vector_matter", "gauge_experiment"};
  return names;
}

/// One run of the harness. Unset optionals take per-case defaults in
/// `resolved()`.
struct CaseConfig {
  std::string case_name = "weakfield";
  std::optional<int> n;                        // points per active axis
  std::array<bool, 4> active_axes{true, true, false, false};
  std::optional<int> stencil_order;
  std::optional<double> epsilon;               // metric perturbation amplitude
  double mass = 1.0;
  std::uint64_t seed = 1;
  std::vector<int> levels{16, 32, 64};
  int oracle_samples = 20;
  std::vector<double> gauge_epsilons{1e-2, 1e-3};
  StressForm stress_form = StressForm::SqrtOutside;
  std::map<std::string, double> tolerance_overrides;  // check name -> constant

  bool gauge() const { return case_name == "gauge_experiment"; }

  int resolved_n() const { return n.value_or(gauge() ? 64 : 32); }
  int resolved_order() const { return stencil_order.value_or(gauge() ? 4 : 2); }
  double resolved_epsilon() const { return epsilon.value_or(gauge() ? 0.1 : 1e-2); }

  std::array<int, 4> sizes(int npts) const {
    std::array<int, 4> s{};
    for (int a = 0; a < 4; ++a) s[a] = active_axes[a] ? npts : 1;
    return s;
  }

  void validate() const {
    bool known = false;
    for (const auto& c : case_names()) known = known || c == case_name;
    if (!known) throw ConfigError("unknown case '" + case_name + "'");
    if (resolved_n() < 1) throw ConfigError("n must be positive");
    if (resolved_order() != 2 && resolved_order() != 4) throw ConfigError("order must be 2 or 4");
    if (!(mass >= 0.0)) throw ConfigError("mass must be non-negative");
    if (oracle_samples < 0) throw ConfigError("oracle_samples must be non-negative");
    bool any = false;
    for (bool b : active_axes) any = any || b;
    if (!any) throw ConfigError("at least one axis must be active");
    if (gauge_epsilons.size() < 2) throw ConfigError("gauge_epsilons needs at least two values");
  }
};

inline const char* stress_form_name(StressForm f) {
  return f == StressForm::SqrtOutside ? "sqrt_outside" : "sqrt_inside";
}

inline nlohmann::ordered_json config_to_json(const CaseConfig& c) {
  nlohmann::ordered_json j;
  j["case"] = c.case_name;
  j["n"] = c.resolved_n();
  j["active_axes"] = std::vector<int>{c.active_axes[0], c.active_axes[1], c.active_axes[2], c.active_axes[3]};
  j["order"] = c.resolved_order();
  j["eps"] = c.resolved_epsilon();
  j["mass"] = c.mass;
  j["seed"] = c.seed;
  j["levels"] = c.levels;
  j["oracle_samples"] = c.oracle_samples;
  j["gauge_eps"] = c.gauge_epsilons;
  j["stress_form"] = stress_form_name(c.stress_form);
  nlohmann::ordered_json tol = nlohmann::ordered_json::object();
  for (const auto& [k, v] : c.tolerance_overrides) tol[k] = v;
  j["tolerances"] = tol;
  return j;
}

/// Reads the JSON config format. Unknown keys are rejected.
inline CaseConfig config_from_json(const nlohmann::json& j) {
  CaseConfig c;
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "case") c.case_name = v.get<std::string>();
      else if (key == "n") c.n = v.get<int>();
      else if (key == "active_axes") {
        const auto a = v.get<std::vector<int>>();
        if (a.size() != 4) throw ConfigError("active_axes needs four entries");
        for (int i = 0; i < 4; ++i) c.active_axes[i] = a[i] != 0;
      } else if (key == "order") c.stencil_order = v.get<int>();
      else if (key == "eps") c.epsilon = v.get<double>();
      else if (key == "mass") c.mass = v.get<double>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "levels") c.levels = v.get<std::vector<int>>();
      else if (key == "oracle_samples") c.oracle_samples = v.get<int>();
      else if (key == "gauge_eps") c.gauge_epsilons = v.get<std::vector<double>>();
      else if (key == "stress_form") {
        const auto s = v.get<std::string>();
        if (s == "sqrt_outside") c.stress_form = StressForm::SqrtOutside;
        else if (s == "sqrt_inside") c.stress_form = StressForm::SqrtInside;
        else throw ConfigError("stress_form must be sqrt_outside or sqrt_inside");
      } else if (key == "tolerances") {
        for (const auto& [name, t] : v.items()) c.tolerance_overrides[name] = t.get<double>();
      } else {
        throw ConfigError("unknown config key '" + key + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config key '" + key + "': " + e.what());
    }
  }
  return c;
}

inline CaseConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  try {
    return config_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace gravitensor
