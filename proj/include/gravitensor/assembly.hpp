#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "gravitensor/grav_sector.hpp"
#include "gravitensor/matter_sector.hpp"

namespace gravitensor {

/// Gravity plus vector matter on a shared metric.
struct TotalSystem {
  VariationalBundle vb;          // engine on sqrt(g) K + L_M over (phi_a, g_ab)
  TensorField<3> h_total;        // H^{ab,mu} = H_0 + H_M
  TensorField<2> g_total;        // G^{ab} = G_0 + M
  TensorField<1> g_matter;       // G^a
  TensorField<2> e_total;        // E_0 + E_M + H_M^{ab,mu} g_{ab,sigma}
  TensorField<2> einstein_defect;  // sqrt(g)(R^{ab} - 1/2 g^{ab} R) - M^{ab}
};

inline TotalSystem build_total(const GravSector& gs, const MatterSector& ms) {
  using enum Variance;
  if (!(gs.grid() == ms.grid())) throw GridError("build_total: sectors live on different grids");
  if (linf_diff(gs.metric.g, ms.metric.g) != 0.0) throw Error("build_total: sectors use different metrics");
  TotalSystem ts;
  SpinStructure spin;
  spin.add(SpinStructure::Block::Covector).add(SpinStructure::Block::CovariantTensor2);
  ts.vb = build_variational(VectorMatterDensity(ms.mass, true), matter_components(ms.phi, ms.metric.g), spin);
  ts.h_total = add(gs.h0, ms.h_g);
  ts.g_total = add(gs.g0, ms.m_stress);
  ts.g_matter = ms.g_vec;
  ts.e_total = add(gs.e0, ms.e1);
  ts.einstein_defect = add(scale(gs.g0_einstein, -1.0), ms.m_stress, -1.0);
  return ts;
}

/// Largest relative difference between the summed sector fields and the
/// engine run on the total Lagrangian.
inline double additivity_defect(const TotalSystem& ts) {
  using enum Variance;
  const auto& vb = ts.vb;
  TensorField<3> h(vb.h.grid(), {Up, Up, Up});
  for (std::size_t p = 0; p < h.points(); ++p)
    for (int i = 0; i < 64; ++i) h.value(p, i) = vb.h.value(p, 16 + i);
  const auto g = matrix_block(vb.g_euler, 4, {Up, Up});
  double d = linf_diff(h, ts.h_total) / std::max(linf(ts.h_total), 1e-30);
  d = std::max(d, linf_diff(g, ts.g_total) / std::max(linf(ts.g_total), 1e-30));
  d = std::max(d, linf_diff(vb.energy, ts.e_total) / std::max(linf(ts.e_total), 1e-30));
  return d;
}

/// d_mu E^mu_sigma + G^{ab} g_{ab,sigma} + G^a phi_{a,sigma}.
inline Residual<1> total_translation(const TotalSystem& ts, const MatterSector& ms) {
  const auto div = divergence(ts.e_total, 0);
  const auto gdg = euler_times_metric_gradient(ts.g_total, ms.metric.dg);
  const auto gphi = vector_euler_times_gradient(ms);
  return combine<1>({{1.0, &div}, {1.0, &gdg}, {1.0, &gphi}});
}

/// One on-shell statement recast off-shell: `lhs` is the expression that
/// vanishes on-shell; `rhs` is the same quantity rebuilt from verified
/// identity residuals minus Euler-derivative terms. The defect is pure
/// re-arithmetic.
struct Recombination {
  std::string name;
  std::string statement;
  double defect = 0.0;         // |lhs - rhs|_inf / max(|lhs|_inf, |rhs|_inf)
  double lhs_linf = 0.0;
  std::string reduces_to;
};

namespace detail {

template <int Rank>
Recombination recombine(std::string name, std::string statement, std::string reduces_to, const TensorField<Rank>& lhs,
                        const TensorField<Rank>& rhs) {
  Recombination r{std::move(name), std::move(statement), 0.0, linf(lhs), std::move(reduces_to)};
  r.defect = linf_diff(lhs, rhs) / std::max({linf(lhs), linf(rhs), 1e-300});
  return r;
}

}  // namespace detail

inline std::vector<Recombination> onshell_recombinations(const GravSector& gs, const MatterSector& ms,
                                                         const TotalSystem& ts) {
  const auto& dg = ms.metric.dg;
  const auto& g = ms.metric.g;
  const auto r14 = grav_translation(gs).field;
  const auto r24 = grav_energy_identity(gs).field;
  const auto r33 = matter_translation(ms).field;
  const auto r36 = matter_energy_identity(ms).field;
  const auto r37 = matter_gauge_identity(ms).field;
  const auto r49 = total_translation(ts, ms).field;

  const auto gtot_dg = euler_times_metric_gradient(ts.g_total, dg);
  const auto m_dg = euler_times_metric_gradient(ms.m_stress, dg);
  const auto gphi = vector_euler_times_gradient(ms);
  const auto gspin = vector_euler_spin(ms);
  const auto gtot_g = lower_second_with(ts.g_total, g);
  const auto m_g = lower_second_with(ms.m_stress, g);
  const auto hdg = contract_with_metric_gradient(ms.h_g, dg);

  std::vector<Recombination> out;

  {  // total energy conservation
    const auto lhs = divergence(ts.e_total, 0);
    auto rhs = add(add(r49, gtot_dg, -1.0), gphi, -1.0);
    out.push_back(detail::recombine("energy_conservation", "d_mu E^mu_s = 0", "total_translation", lhs, rhs));
  }
  {  // gravitational energy balance
    const auto lhs = add(divergence(gs.e0, 0), m_dg, -1.0);
    const auto rhs = add(r14, gtot_dg, -1.0);
    out.push_back(detail::recombine("grav_energy_flux", "d_mu E_0^mu_s - M^{ab} g_{ab,s} = 0", "grav_translation",
                                    lhs, rhs));
  }
  {  // matter energy balance
    const auto lhs = add(add(divergence(ms.em, 0), m_dg), divergence(hdg, 0));
    const auto rhs = add(r33, gphi, -1.0);
    out.push_back(detail::recombine("matter_energy_flux",
                                    "d_mu E_M^mu_s + M^{ab} g_{ab,s} + d_mu(H_M^{ab,mu} g_{ab,s}) = 0",
                                    "matter_translation", lhs, rhs));
  }
  const auto div_k0 = divergence(gs.k0, 0);
  const auto div_k1 = divergence(ms.k1, 0);
  {  // total energy balance
    const auto lhs = add(add(ts.e_total, div_k0), div_k1);
    const auto rhs = add(add(add(r24, r36), gtot_g, -2.0), gspin, -1.0);
    out.push_back(detail::recombine("energy_balance", "E^mu_s + d_l(K_0^{l mu}_s + K_1^{l mu}_s) = 0",
                                    "grav_energy_identity + matter_energy_identity", lhs, rhs));
  }
  {  // gravitational part of the balance
    const auto lhs = add(add(gs.e0, m_g, -2.0), div_k0);
    const auto rhs = add(r24, gtot_g, -2.0);
    out.push_back(detail::recombine("grav_energy_balance", "E_0^mu_s - 2 M^{mu b} g_{b s} + d_l K_0^{l mu}_s = 0",
                                    "grav_energy_identity", lhs, rhs));
  }
  {  // matter part of the balance
    const auto lhs = add(add(add(ms.em, m_g, 2.0), hdg), div_k1);
    const auto rhs = add(r36, gspin, -1.0);
    out.push_back(detail::recombine(
        "matter_energy_balance",
        "E_M^mu_s + 2 M^{mu b} g_{b s} + H_M^{ab,mu} g_{ab,s} + d_l(H^l S^mu_s + 2 H_M^{mu b,l} g_{b s}) = 0",
        "matter_energy_identity", lhs, rhs));
  }
  {  // stress-tensor Bianchi form
    const auto lhs = stress_bianchi(ms).field;
    const auto rhs = add(add(r37, divergence(gspin, 0), -1.0), gphi);
    out.push_back(detail::recombine("stress_bianchi", "2 d_b(M^{ba} g_{a l}) - M^{ab} g_{ab,l} = 0",
                                    "matter_gauge_identity", lhs, rhs));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Gauge experiment

/// Lie-derivative variations generated by xi^l.
struct GaugeVariation {
  TensorField<1> xi;
  SymmetricField delta_g;  // -xi^s d_s g_{ab} - g_{lb} d_a xi^l - g_{al} d_b xi^l
  TensorField<1> delta_phi;  // -xi^s d_s phi_a - phi_l d_a xi^l
};

inline GaugeVariation gauge_variation(const TensorField<1>& xi, const SymmetricField& g, const TensorField<1>& phi) {
  using enum Variance;
  if (xi.slots()[0] != Up) throw IndexError("gauge generator must be a vector");
  require_same_grid(xi, g, "gauge_variation");
  require_same_grid(phi, g, "gauge_variation");
  const auto dxi = gradient(xi);   // [l][a] = d_a xi^l
  const auto dg = gradient(g);     // [a][b][s]
  const auto dphi = gradient(phi); // [a][s]
  GaugeVariation gv;
  gv.xi = xi;
  gv.delta_g = make_symmetric(g.grid(), Down, [&](std::size_t p) {
    const auto x = xi.at(p);
    const auto dx = dxi.at(p);
    const auto d = dg.at(p);
    const auto gm = g.at(p);
    Matrix4 r;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        double v = 0.0;
        for (int s = 0; s < 4; ++s) v -= x(s) * d(a, b, s);
        for (int l = 0; l < 4; ++l) v -= gm(l, b) * dx(l, a) + gm(a, l) * dx(l, b);
        r(a, b) = v;
      }
    return r;
  });
  gv.delta_phi = make_field<1>(g.grid(), {Down}, [&](std::size_t p) {
    const auto x = xi.at(p);
    const auto dx = dxi.at(p);
    const auto d = dphi.at(p);
    Tensor<1> r;
    for (int a = 0; a < 4; ++a) {
      double v = 0.0;
      for (int s = 0; s < 4; ++s) v -= x(s) * d(a, s);
      for (int l = 0; l < 4; ++l) v -= phi.value(p, l) * dx(l, a);
      r(a) = v;
    }
    return r;
  });
  return gv;
}

/// A = sum (sqrt(g) K + d_mu B^mu + L_M) * cell volume.
inline double total_action(const MetricBundle& mb, const TensorField<1>& phi, double mass) {
  const Grid& grid = mb.grid();
  const auto div_b = divergence(mb.b, 0);
  const auto dphi = gradient(phi);
  double s = 0.0;
  for (std::size_t p = 0; p < grid.points(); ++p) {
    const auto pg = point_geometry_at(mb, p);
    const auto d = covariant_derivative_point(pg, phi.at(p), dphi.at(p));
    s += pg.sqrt_g * pg.k_scalar + div_b.value(p, 0) + matter_lagrangian_point(pg, phi.at(p), d, mass);
  }
  return s * grid.cell_volume();
}

struct GaugeStep {
  double epsilon = 0.0;
  double action_change = 0.0;  // |A(eps) - A(0)|
  double e0_change = 0.0;      // |E_0(eps) - E_0(0)|_inf
};

struct GaugeReport {
  std::vector<GaugeStep> steps;
  double action_exponent = 0.0;  // slope of log|dA| against log eps
  double e0_exponent = 0.0;
  double action_base = 0.0;
};

/// Slope of log(y) against log(x) between the first and last entries.
inline double scaling_exponent(double x0, double y0, double x1, double y1) {
  return std::log(y0 / y1) / std::log(x0 / x1);
}

/// Perturbs (g, phi) along the gauge direction by each epsilon and measures
/// the action and E_0 responses. `on_transformed` (optional) receives the
/// transformed metric and field for further checks.
template <class OnTransformed>
GaugeReport gauge_experiment(const SymmetricField& g, const TensorField<1>& phi, double mass, const TensorField<1>& xi,
                             const std::vector<double>& epsilons, OnTransformed&& on_transformed) {
  if (epsilons.size() < 2) throw Error("gauge_experiment needs at least two amplitudes");
  const auto gv = gauge_variation(xi, g, phi);
  const auto mb0 = build_metric_bundle(g);
  const double a0 = total_action(mb0, phi, mass);
  const auto e0 = build_grav_sector(mb0).e0;
  GaugeReport rep;
  rep.action_base = a0;
  for (double eps : epsilons) {
    const auto g1 = add(g, gv.delta_g, eps);
    const auto phi1 = add(phi, gv.delta_phi, eps);
    const auto mb1 = build_metric_bundle(g1);  // throws on signature loss
    GaugeStep st;
    st.epsilon = eps;
    st.action_change = std::abs(total_action(mb1, phi1, mass) - a0);
    st.e0_change = linf_diff(build_grav_sector(mb1).e0, e0);
    rep.steps.push_back(st);
    on_transformed(eps, mb1, phi1);
  }
  const auto& f = rep.steps.front();
  const auto& l = rep.steps.back();
  rep.action_exponent = scaling_exponent(f.epsilon, f.action_change, l.epsilon, l.action_change);
  rep.e0_exponent = scaling_exponent(f.epsilon, f.e0_change, l.epsilon, l.e0_change);
  return rep;
}

}  // namespace gravitensor
