#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gravitensor/assembly.hpp"
#include "gravitensor/harness/cases.hpp"
#include "gravitensor/harness/config.hpp"
#include "gravitensor/harness/tolerances.hpp"

namespace gravitensor {

struct CheckResult {
  std::string name;
  std::string group;
  std::string anchor;          // the formula the check evaluates
  std::string tolerance_key;   // entry in the tolerance table
  CheckKind kind = CheckKind::Truncation;
  std::optional<double> linf;  // residual norms, absent for scalar measurements
  std::optional<double> rms;
  std::optional<double> scale;
  double measured = 0.0;       // relative residual, oracle error, exponent or ratio
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
};

struct GaugeSummary {
  std::vector<GaugeStep> steps;
  double action_exponent = 0.0;
  double e0_exponent = 0.0;
  double max_identity_ratio = 0.0;
};

struct IdentityReport {
  CaseConfig config;
  std::array<int, 4> sizes{};
  int order = 2;
  double spacing = 0.0;
  std::vector<CheckResult> checks;
  std::optional<GaugeSummary> gauge;

  bool all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
  }
  std::size_t passed() const {
    return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; }));
  }
  const CheckResult* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

struct SuiteOptions {
  bool identities = true;
  bool oracles = true;
  bool gauge = true;
};

/// Floor of the oracle denominator; keeps flat-space round-off (analytic value
/// exactly zero, numeric value ~1e-16) from reading as a relative error.
inline constexpr double kOracleFloor = 1e-8;

/// Accumulates checks for one case, resolving tolerances from the table.
class CheckList {
 public:
  CheckList(const CaseConfig& cfg, const Grid& grid) : cfg_(cfg), grid_(grid) {}

  template <int R>
  void residual(const std::string& name, const std::string& group, const std::string& anchor, const std::string& key,
                const Residual<R>& r, std::string note = {}) {
    if (!r.field.all_finite()) throw NumericError("non-finite residual in check '" + name + "'");
    const auto n = norms(r);
    CheckResult c = make(name, group, anchor, key, n.relative(), std::move(note));
    c.linf = n.linf;
    c.rms = n.rms;
    c.scale = n.scale;
    push(std::move(c));
  }

  /// a - b with the larger operand norm as the scale.
  template <class Field>
  void difference(const std::string& name, const std::string& group, const std::string& anchor, const std::string& key,
                  const Field& a, const Field& b, std::string note = {}) {
    difference(name, group, anchor, key, a, b, std::max(linf(a), linf(b)), std::move(note));
  }

  /// a - b against an explicit scale, for two evaluations of one residual.
  template <class Field>
  void difference(const std::string& name, const std::string& group, const std::string& anchor, const std::string& key,
                  const Field& a, const Field& b, double sc, std::string note = {}) {
    require_same_grid(a, b, name.c_str());
    if (a.components() != b.components()) throw IndexError("check '" + name + "': operands differ in shape");
    FieldData diff(a.grid(), a.components());
    for (std::size_t i = 0; i < diff.values().size(); ++i) diff.values()[i] = a.values()[i] - b.values()[i];
    if (!diff.all_finite()) throw NumericError("non-finite residual in check '" + name + "'");
    CheckResult c = make(name, group, anchor, key, linf(diff) / std::max(sc, 1e-30), std::move(note));
    c.linf = linf(diff);
    c.rms = rms(diff);
    c.scale = sc;
    push(std::move(c));
  }

  void measurement(const std::string& name, const std::string& group, const std::string& anchor, const std::string& key,
                   double value, std::string note = {}) {
    push(make(name, group, anchor, key, value, std::move(note)));
  }

  std::vector<CheckResult> take() { return std::move(checks_); }

 private:
  CheckResult make(const std::string& name, const std::string& group, const std::string& anchor, const std::string& key,
                   double value, std::string note) const {
    if (!std::isfinite(value)) throw NumericError("non-finite value in check '" + name + "'");
    CheckResult c;
    c.name = name;
    c.group = group;
    c.anchor = anchor;
    c.tolerance_key = key;
    c.kind = tolerance_entry(key).kind;
    c.measured = value;
    const double* over = nullptr;
    if (auto it = cfg_.tolerance_overrides.find(name); it != cfg_.tolerance_overrides.end()) over = &it->second;
    else if (auto jt = cfg_.tolerance_overrides.find(key); jt != cfg_.tolerance_overrides.end()) over = &jt->second;
    c.tolerance = tolerance_for(key, grid_, over);
    switch (c.kind) {
      case CheckKind::ExponentAtLeast: c.pass = value >= c.tolerance; break;
      default: c.pass = value <= c.tolerance; break;
    }
    c.note = std::move(note);
    return c;
  }

  void push(CheckResult c) {
    for (const auto& o : checks_)
      if (o.name == c.name) throw Error("duplicate check name '" + c.name + "'");
    checks_.push_back(std::move(c));
  }

  const CaseConfig& cfg_;
  const Grid& grid_;
  std::vector<CheckResult> checks_;
};

namespace detail {

/// Relative residuals of the differential identities used to compare
/// gauge-transformed fields with the originals.
inline std::vector<std::pair<std::string, double>> core_identities(const MetricBundle& mb, const TensorField<1>& phi,
                                                                   double mass, StressForm form) {
  const auto gs = build_grav_sector(mb);
  const auto ms = build_matter_sector(mb, phi, mass, form);
  const auto ts = build_total(gs, ms);
  return {
      {"density_decomposition", norms(verify_density_decomposition(mb)).relative()},
      {"contracted_bianchi", norms(verify_contracted_bianchi(mb)).relative()},
      {"grav_translation", norms(grav_translation(gs)).relative()},
      {"grav_energy_identity", norms(grav_energy_identity(gs)).relative()},
      {"grav_bianchi", norms(grav_bianchi(gs)).relative()},
      {"matter_translation", norms(matter_translation(ms)).relative()},
      {"matter_energy_identity", norms(matter_energy_identity(ms)).relative()},
      {"matter_gauge_identity", norms(matter_gauge_identity(ms)).relative()},
      {"total_translation", norms(total_translation(ts, ms)).relative()},
  };
}

inline std::string em_note(const EnergyMomentum& em) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s: |dd K| = %.3e, threshold %.3e",
                em.which == EmCase::ZOnly ? "T = Z" : "T = Z + t", em.ddk_linf, em.threshold);
  return buf;
}

/// T from the engine with the selector threshold at ten times the
/// translation-identity residual.
inline Residual<2> em_residual(const VariationalBundle& vb, std::string& note) {
  const double threshold = 10.0 * linf(verify_identity_I(vb).field);
  const auto em = em_tensor(vb, threshold);
  note = em_note(em);
  Residual<2> r{em.t, std::max({linf(vb.energy), linf(vb.g_spin), linf(divergence(vb.k_aux, 0))})};
  if (em.which == EmCase::ZPlusT) r.scale = std::max(r.scale, linf(vb.t));
  return r;
}

inline void variational_checks(CheckList& cl, const std::string& prefix, const VariationalBundle& vb) {
  cl.residual(prefix + "_identity_translation", "variational", "d_mu E^mu_s + G^A phi^A_{,s} = 0",
              "identity_translation", verify_identity_I(vb));
  cl.residual(prefix + "_identity_lorentz", "variational", "Z^{mu a} - Z^{a mu} = 0", "identity_lorentz",
              verify_identity_II(vb));
  cl.residual(prefix + "_identity_divergence", "variational",
              "d_mu Z^mu_s + G phi_s - d_mu(G S^mu_s) - d_mu d_l K^{l mu}_s = 0", "identity_divergence",
              verify_identity_III(vb));
}

}  // namespace detail

/// Runs every applicable check for one configuration on an n-point grid.
inline IdentityReport run_suite(const CaseConfig& cfg, int n, const SuiteOptions& opt = {}) {
  const auto gc = generate_case(cfg, n);
  const Grid& grid = gc.g.grid();
  IdentityReport rep;
  rep.config = cfg;
  rep.config.n = n;
  rep.sizes = grid.sizes();
  rep.order = grid.stencil_order();
  rep.spacing = grid.max_active_spacing();

  const bool flat = cfg.case_name == "flat";
  const bool matter = gc.has_matter || flat;
  CheckList cl(cfg, grid);

  const auto mb = build_metric_bundle(gc.g);
  const auto gs = build_grav_sector(mb);
  std::optional<MatterSector> ms;
  std::optional<TotalSystem> ts;
  if (matter) {
    ms = build_matter_sector(mb, gc.phi, gc.mass, cfg.stress_form);
    ts = build_total(gs, *ms);
  }

  if (opt.identities) {
    // geometry
    cl.residual("density_decomposition", "geometry", "R sqrt(g) = K sqrt(g) + d_mu B^mu", "density_decomposition",
                verify_density_decomposition(mb));
    cl.residual("contracted_bianchi", "geometry", "d_mu(sqrt(g) G^mu_s) = 1/2 sqrt(g) G^{ab} g_{ab,s}",
                "contracted_bianchi", verify_contracted_bianchi(mb));

    // density-weighted representation
    const auto hr = h_representation(mb);
    cl.difference("rep_a_alt", "representation", "h_{mu b} d_l h^{b nu} = -h^{nu b} d_l h_{b mu}", "rep_a_alt", hr.a3,
                  hr.a3_alt);
    cl.difference("rep_a_connection", "representation",
                  "A^nu_{mu l} = delta^nu_mu Gamma^s_{s l} - g^{nu b}(Gamma_{b mu l} + Gamma_{mu b l})",
                  "rep_a_connection", hr.a3, hr.a3_gamma);
    cl.difference("rep_a_trace", "representation", "A_l = 2 Gamma^s_{s l}", "rep_a_trace", hr.a1, hr.a1_gamma);
    cl.difference("rep_connection", "representation", "Gamma^mu_{nu s} from A-quantities", "rep_connection",
                  hr.gamma_rep, mb.conn.gamma);
    cl.difference("rep_k_density", "representation", "K sqrt(g) from A-quantities", "rep_k_density",
                  hr.k_density_rep, hr.k_density);
    cl.difference("rep_boundary", "representation", "B^mu = -d_a h^{mu a} - 1/2 h^{mu a} A_a", "rep_boundary",
                  hr.b_rep, mb.b);
    {
      Residual<2> curl{hr.curl_a, linf(gradient(hr.a1))};
      cl.residual("a_curl", "representation", "d_m A_n - d_n A_m = 0", "a_curl", curl);
      Residual<2> curl_ld{hr.curl_log_det, linf(gradient(hr.log_det_gradient))};
      cl.residual("log_det_curl", "representation", "d_m d_n ln g - d_n d_m ln g = 0", "log_det_curl", curl_ld);
    }

    // engine on sqrt(g) K
    detail::variational_checks(cl, "grav", gs.vb);
    cl.residual("grav_t_symmetry", "variational", "t^{mu a} = t^{a mu}", "t_symmetry", t_symmetry(gs.vb));
    {
      std::string note;
      const auto r = detail::em_residual(gs.vb, note);
      cl.residual("grav_em_tensor_vanishes", "variational", "T^{mu a} = 0 for sqrt(g) K", "grav_em_tensor_vanishes", r,
                  note);
    }

    // gravitational sector
    cl.residual("grav_translation", "gravity", "d_mu E_0^mu_s + G_0^{ab} g_{ab,s} = 0", "grav_translation",
                grav_translation(gs));
    cl.residual("grav_double_divergence", "gravity", "d_a d_b K_0^{ab}_l = 0", "grav_double_divergence",
                grav_double_divergence(gs));
    const auto r24 = grav_energy_identity(gs);
    cl.residual("grav_energy_identity", "gravity", "E_0^mu_s + 2 G_0^{mu a} g_{a s} + d_l K_0^{l mu}_s = 0",
                "grav_energy_identity", r24);
    cl.difference("grav_energy_identity_engine", "gravity", "Z_0^mu_s = E_0^mu_s + 2 G_0^{mu a} g_{a s} + d_l K_0^{l mu}_s",
                  "grav_energy_identity_engine", gs.vb.z, r24.field, r24.scale);
    const auto r25 = grav_bianchi(gs);
    cl.residual("grav_bianchi", "gravity", "2 d_b(G_0^{ba} g_{a l}) = G_0^{ab} g_{ab,l}", "grav_bianchi", r25);
    cl.difference("bianchi_forms_agree", "gravity",
                  "2 d_b(G_0^{ba} g_{a l}) - G_0^{ab} g_{ab,l} = -2 [d_mu(sqrt(g) G^mu_l) - 1/2 sqrt(g) G^{ab} g_{ab,l}]",
                  "bianchi_forms_agree", r25.field, scale(verify_contracted_bianchi(mb).field, -2.0), r25.scale);
    cl.residual("grav_symmetrized_k0", "gravity",
                "1/2(K_0^{ab}_l + K_0^{ba}_l) = d_m[1/2 delta^a_l h^{mb} + 1/2 delta^b_l h^{ma} - delta^m_l h^{ab}]",
                "grav_symmetrized_k0", grav_symmetrized_k0(gs));
    cl.residual("grav_t_divergence", "gravity", "d_mu t^{mu a} = 0", "grav_t_divergence", grav_t_divergence(gs));
    cl.residual("grav_w_consistency", "gravity", "W_0 from h-stencils = W from K_0", "grav_w_consistency",
                grav_w_consistency(gs));
    cl.difference("e0_forms", "gravity", "H_0^{ab,mu} g_{ab,s} - delta^mu_s sqrt(g) K = E_0 in h-derivatives",
                  "e0_forms", gs.e0, gs.e0_h);
    cl.difference("g0_paths", "gravity", "G_0^{ab} = -sqrt(g)(R^{ab} - 1/2 g^{ab} R)", "g0_paths", gs.g0,
                  gs.g0_einstein);

    if (ms) {
      const auto stress_note = std::string("stress form ") + stress_form_name(cfg.stress_form);
      detail::variational_checks(cl, "matter", ms->vb);
      {
        std::string note;
        const auto r = detail::em_residual(ms->vb, note);
        cl.residual("matter_em_tensor_vanishes", "variational", "T^{mu a} = 0 for L_M", "matter_em_tensor_vanishes", r,
                    note);
      }
      cl.residual("matter_translation", "matter", "d_mu E_1^mu_s + G^a phi_{a,s} + M^{ab} g_{ab,s} = 0",
                  "matter_translation", matter_translation(*ms));
      const auto r36 = matter_energy_identity(*ms);
      cl.residual("matter_energy_identity", "matter",
                  "E_M + G S + d_l(H^l S) + 2 M^{mu b} g_{b s} + H_M^{ab,mu} g_{ab,s} + 2 d_l(H_M^{mu b,l} g_{b s}) = 0",
                  "matter_energy_identity", r36);
      cl.difference("matter_energy_identity_engine", "matter", "Z_1^mu_s = expanded matter energy identity",
                    "matter_energy_identity_engine", ms->vb.z, r36.field, r36.scale);
      cl.residual("matter_gauge_identity", "matter", "d_b[G^b phi_l + 2 M^{ba} g_{a l}] = G^a phi_{a,l} + M^{ab} g_{ab,l}",
                  "matter_gauge_identity", matter_gauge_identity(*ms));
      cl.residual("k1_symmetric_part", "matter", "K_1^{mu a}_l + K_1^{a mu}_l = 0", "k1_symmetric_part",
                  k1_symmetric_part(*ms));
      cl.difference("vector_euler_closed", "matter", "G^a = -2 sqrt(g)[D_mu D^mu phi^a + m^2 phi^a]",
                    "vector_euler_closed", ms->g_vec, ms->g_vec_closed);
      cl.difference("stress_closed", "matter", "M^{ab} = closed form", "stress_closed", ms->m_stress, ms->m_closed,
                    stress_note);

      cl.measurement("total_additivity", "total", "H, G, E of the total Lagrangian = sums of sector parts",
                     "total_additivity", additivity_defect(*ts));
      const auto r49 = total_translation(*ts, *ms);
      cl.residual("total_translation", "total", "d_mu E^mu_s + G^{ab} g_{ab,s} + G phi_s = 0", "total_translation", r49);
      cl.difference("total_translation_split", "total", "total translation residual = gravity + matter residuals",
                    "total_translation_split", r49.field, add(grav_translation(gs).field, matter_translation(*ms).field),
                    r49.scale);
      for (const auto& rc : onshell_recombinations(gs, *ms, *ts))
        cl.measurement("recombination_" + rc.name, "onshell", rc.statement, "recombination", rc.defect,
                       "reduces to " + rc.reduces_to);

      if (cfg.case_name == "vector_matter") {
        // flat metric, m = 1 and a field solving the matter equation
        const auto flat_g = make_symmetric(grid, Variance::Down, [](std::size_t) { return minkowski(); });
        const auto mb_on = build_metric_bundle(flat_g);
        const auto ms_on = build_matter_sector(mb_on, onshell_vector_field(grid), 1.0, cfg.stress_form);
        const bool time_active = grid.active(0);
        auto r62 = stress_bianchi(ms_on);
        r62.scale = linf(ms_on.m_stress);
        cl.residual("stress_bianchi_onshell", "onshell", "2 d_b(M^{ba} g_{a l}) = M^{ab} g_{ab,l}",
                    "stress_bianchi_onshell", r62,
                    time_active ? "flat metric, m = 1, phi_a = a_a sin(x^0 + 0.7 a)" : "time axis inactive: phi constant");
      }
    }

    if (flat) {
      double worst = 0.0;
      const auto track = [&](const FieldData& f) { worst = std::max(worst, linf(f)); };
      track(mb.conn.lower), track(mb.conn.gamma), track(mb.curv.k_tensor), track(mb.curv.k_scalar), track(mb.b);
      track(mb.curv.ricci), track(mb.curv.r_scalar), track(mb.curv.einstein);
      track(gs.h0), track(gs.g0), track(gs.e0), track(gs.k0), track(gs.w0), track(gs.t);
      track(gs.vb.z), track(gs.vb.w), track(gs.vb.t);
      if (ms) {
        track(ms->dphi_cov), track(ms->lagrangian), track(ms->h_phi), track(ms->h_g), track(ms->g_vec);
        track(ms->m_stress), track(ms->em), track(ms->e1), track(ms->k1), track(ms->vb.z);
      }
      cl.measurement("flat_annihilation", "flat", "every derived quantity vanishes on g = eta, phi = 0",
                     "flat_annihilation", worst, "absolute L-infinity");
    }
  }

  if (opt.oracles && cfg.oracle_samples > 0) {
    std::mt19937_64 rng(cfg.seed * 0x9E3779B97F4A7C15ULL + 17);
    std::vector<std::size_t> pts;
    for (int k = 0; k < cfg.oracle_samples; ++k) pts.push_back(static_cast<std::size_t>(rng() % grid.points()));
    const auto functional = [&](const LagrangianDensity& lag, const ComponentField& field, const ComponentField& analytic,
                                std::size_t c0, std::size_t c1, double field_scale) {
      double worst = 0.0;
      for (std::size_t p : pts)
        for (std::size_t c = c0; c < c1; ++c) {
          const double num = functional_oracle(lag, field, p, c);
          const double an = analytic.value(p, c);
          worst = std::max(worst, std::abs(num - an) / std::max({std::abs(num), field_scale, kOracleFloor}));
        }
      return worst;
    };
    const auto pointwise = [&](auto&& f) {
      double worst = 0.0;
      for (std::size_t p : pts) worst = std::max(worst, f(p));
      return worst;
    };
    const std::string samples = std::to_string(pts.size()) + " seeded points";
    cl.measurement("oracle_h0", "oracle", "H_0^{ab,mu} = d(sqrt(g) K)/d g_{ab,mu}", "oracle",
                   pointwise([&](std::size_t p) { return h0_oracle(gs, p); }), samples);
    cl.measurement("oracle_boundary_partial", "oracle",
                   "dB^mu/dg_{ar,b} g_{rl} = -delta^a_l h^{mb} + 1/2 delta^b_l h^{ma} + 1/2 delta^m_l h^{ab}", "oracle",
                   pointwise([&](std::size_t p) { return boundary_partial_oracle(mb, p); }), samples);
    cl.measurement("oracle_g0", "oracle", "G_0^{ab} = functional derivative of sum sqrt(g) K in g_{ab}", "oracle",
                   functional(GravityDensity{}, gs.vb.phi, gs.vb.g_euler, 0, 16, linf(gs.g0)), samples);
    if (ms) {
      cl.measurement("oracle_h_phi", "oracle", "H_M^{a,mu} = dL_M/d phi_{a,mu}", "oracle",
                     pointwise([&](std::size_t p) { return h_phi_oracle(*ms, p); }), samples);
      cl.measurement("oracle_h_g", "oracle", "H_M^{ab,mu} = dL_M/d g_{ab,mu}", "oracle",
                     pointwise([&](std::size_t p) { return h_g_oracle(*ms, p); }), samples);
      const VectorMatterDensity lm(gc.mass);
      cl.measurement("oracle_g_vec", "oracle", "G^a = functional derivative of sum L_M in phi_a", "oracle",
                     functional(lm, ms->vb.phi, ms->vb.g_euler, 0, 4, linf(ms->g_vec)), samples);
      cl.measurement("oracle_m_stress", "oracle", "M^{ab} = functional derivative of sum L_M in g_{ab}", "oracle",
                     functional(lm, ms->vb.phi, ms->vb.g_euler, 4, 20, linf(ms->m_stress)), samples);
    }
  }

  if (opt.gauge && cfg.gauge()) {
    const auto base = detail::core_identities(mb, gc.phi, gc.mass, cfg.stress_form);
    double worst_ratio = 0.0;
    std::string worst_name;
    const auto report = gauge_experiment(
        gc.g, gc.phi, gc.mass, gauge_generator(grid), cfg.gauge_epsilons,
        [&](double, const MetricBundle& mb1, const TensorField<1>& phi1) {
          const auto tr = detail::core_identities(mb1, phi1, gc.mass, cfg.stress_form);
          for (std::size_t i = 0; i < tr.size(); ++i) {
            const double ratio = tr[i].second / std::max(base[i].second, 1e-30);
            if (ratio > worst_ratio) {
              worst_ratio = ratio;
              worst_name = tr[i].first;
            }
          }
        });
    char buf[96];
    std::snprintf(buf, sizeof buf, "eps %.3g to %.3g", cfg.gauge_epsilons.front(), cfg.gauge_epsilons.back());
    cl.measurement("gauge_action_exponent", "gauge", "|A(eps) - A(0)| ~ eps^p, p >= 2 expected",
                   "gauge_action_exponent", report.action_exponent, buf);
    cl.measurement("gauge_e0_exponent", "gauge", "|E_0(eps) - E_0(0)| ~ eps^p, p = 1 expected", "gauge_e0_exponent",
                   report.e0_exponent, buf);
    cl.measurement("gauge_identity_ratio", "gauge", "identity residuals on transformed fields / original residuals",
                   "gauge_identity_ratio", worst_ratio, "largest: " + worst_name);
    rep.gauge = GaugeSummary{report.steps, report.action_exponent, report.e0_exponent, worst_ratio};
  }

  rep.checks = cl.take();
  return rep;
}

inline IdentityReport run_suite(const CaseConfig& cfg, const SuiteOptions& opt = {}) {
  return run_suite(cfg, cfg.resolved_n(), opt);
}

}  // namespace gravitensor
