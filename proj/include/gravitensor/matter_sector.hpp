#pragma once

#include <cstddef>

#include "gravitensor/geometry.hpp"
#include "gravitensor/grav_sector.hpp"
#include "gravitensor/lagrangians.hpp"
#include "gravitensor/residual.hpp"
#include "gravitensor/variational.hpp"

namespace gravitensor {

/// Which density weighting the closed-form stress tensor uses in its
/// divergence term.
enum class StressForm {
  SqrtOutside,  // 1/2 sqrt(g) D_mu[Y^{ab mu}]
  SqrtInside,   // 1/2 D_mu[sqrt(g) Y^{ab mu}], density weight ignored
};

/// Massive vector field phi_a on a metric.
struct MatterSector {
  MetricBundle metric;
  double mass = 1.0;
  TensorField<1> phi;          // phi_a
  TensorField<2> dphi;         // phi_{a,mu}        [a][mu]
  TensorField<2> dphi_cov;     // D_mu phi_a        [mu][a]
  ScalarField lagrangian;      // L_M
  TensorField<2> h_phi;        // H_M^{a,mu}        [a][mu]
  TensorField<3> h_g;          // H_M^{ab,mu}       [a][b][mu]
  VariationalBundle vb;        // engine on (phi_a, g_ab)
  TensorField<1> g_vec;        // G^a, Euler derivative
  TensorField<2> m_stress;     // M^{ab}, Euler derivative
  TensorField<1> g_vec_closed; // -2 sqrt(g)[D_mu D^mu phi^a + m^2 phi^a]
  TensorField<2> m_closed;     // closed form, selected density weighting
  TensorField<2> em;           // E_M^mu_sigma
  TensorField<2> e1;           // E_1^mu_sigma = E_M + H_M^{ab,mu} g_{ab,sigma}
  TensorField<3> k1;           // K_1^{mu a}_lambda

  const Grid& grid() const { return metric.grid(); }
};

/// D_mu phi_a = d_mu phi_a - Gamma^s_{a mu} phi_s, stored [mu][a].
inline TensorField<2> covariant_derivative(const TensorField<1>& phi, const MetricBundle& mb) {
  require_same_grid(phi, mb.g, "covariant_derivative");
  const auto dphi = gradient(phi);  // [a][mu]
  return make_field<2>(mb.grid(), {Variance::Down, Variance::Down}, [&](std::size_t p) {
    const auto gam = mb.conn.gamma.at(p);
    const auto d = dphi.at(p);
    const auto v = phi.at(p);
    Matrix4 out;
    for (int m = 0; m < 4; ++m)
      for (int a = 0; a < 4; ++a) {
        double x = d(a, m);
        for (int s = 0; s < 4; ++s) x -= gam(s, a, m) * v(s);
        out(m, a) = x;
      }
    return out;
  });
}

inline PointGeometry point_geometry_at(const MetricBundle& mb, std::size_t p) {
  return point_geometry(mb.g.at(p), mb.g_inv.at(p), mb.sqrt_g.value(p, 0), mb.dg.at(p));
}

/// Y^{ab mu} = phi^a S^{b mu} + phi^b S^{a mu} - phi^mu S^{ab}, S^{xy} = D^x phi^y + D^y phi^x.
inline Tensor<3> stress_flux_point(const Matrix4& gi, const Tensor<1>& phi, const Matrix4& d) {
  const Matrix4 duu = matmul(matmul(gi, d), gi);
  Tensor<1> pu;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) pu(a) += gi(a, b) * phi(b);
  Matrix4 s;
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 4; ++y) s(x, y) = duu(x, y) + duu(y, x);
  Tensor<3> y;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int m = 0; m < 4; ++m) y(a, b, m) = pu(a) * s(b, m) + pu(b) * s(a, m) - pu(m) * s(a, b);
  return y;
}

inline TensorField<2> closed_stress(const MatterSector& ms, StressForm form) {
  using enum Variance;
  const auto& mb = ms.metric;
  const Grid& grid = mb.grid();
  const bool inside = form == StressForm::SqrtInside;
  // flux field, weighted by sqrt(g) when the weight sits inside the derivative
  TensorField<3> y(grid, {Up, Up, Up});
  for (std::size_t p = 0; p < grid.points(); ++p) {
    auto v = stress_flux_point(mb.g_inv.at(p), ms.phi.at(p), ms.dphi_cov.at(p));
    if (inside) v *= mb.sqrt_g.value(p, 0);
    y.set(p, v);
  }
  const auto div = divergence(y, 2);  // d_mu Y^{ab mu}
  return make_field<2>(grid, {Up, Up}, [&](std::size_t p) {
    const auto gi = mb.g_inv.at(p);
    const auto gam = mb.conn.gamma.at(p);
    const auto yy = y.at(p);
    const auto dv = div.at(p);
    const double sg = mb.sqrt_g.value(p, 0);
    const auto d = ms.dphi_cov.at(p);
    const Matrix4 duu = matmul(matmul(gi, d), gi);
    const Matrix4 dlu = matmul(d, gi);
    const Matrix4 dul = matmul(gi, d);
    Tensor<1> pu;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) pu(a) += gi(a, b) * ms.phi.value(p, b);
    const double lm = ms.lagrangian.value(p, 0);
    const double m2 = ms.mass * ms.mass;
    Matrix4 out;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        double cd = dv(a, b);  // D_mu Y^{ab mu}
        for (int m = 0; m < 4; ++m)
          for (int l = 0; l < 4; ++l)
            cd += gam(a, m, l) * yy(l, b, m) + gam(b, m, l) * yy(a, l, m) + gam(m, m, l) * yy(a, b, l);
        double quad = -m2 * pu(a) * pu(b);
        for (int m = 0; m < 4; ++m) quad += duu(m, a) * dlu(m, b) + duu(a, m) * dul(b, m);
        out(a, b) = 0.5 * gi(a, b) * lm - sg * quad + 0.5 * (inside ? 1.0 : sg) * cd;
      }
    return out;
  });
}

/// -2 sqrt(g)[D_mu D^mu phi^a + m^2 phi^a], the outer covariant divergence
/// taken on the stencil of D^mu phi^a.
inline TensorField<1> closed_vector_euler(const MatterSector& ms) {
  using enum Variance;
  const auto& mb = ms.metric;
  const auto duu = make_field<2>(mb.grid(), {Up, Up}, [&](std::size_t p) {
    const auto gi = mb.g_inv.at(p);
    return matmul(matmul(gi, ms.dphi_cov.at(p)), gi);  // [mu][a]
  });
  const auto div = divergence(duu, 0);
  return make_field<1>(mb.grid(), {Up}, [&](std::size_t p) {
    const auto gi = mb.g_inv.at(p);
    const auto gam = mb.conn.gamma.at(p);
    const auto t = duu.at(p);
    const auto dv = div.at(p);
    Tensor<1> out;
    for (int a = 0; a < 4; ++a) {
      double v = dv(a);
      for (int m = 0; m < 4; ++m)
        for (int l = 0; l < 4; ++l) v += gam(m, m, l) * t(l, a) + gam(a, m, l) * t(m, l);
      double pu = 0.0;
      for (int b = 0; b < 4; ++b) pu += gi(a, b) * ms.phi.value(p, b);
      out(a) = -2.0 * mb.sqrt_g.value(p, 0) * (v + ms.mass * ms.mass * pu);
    }
    return out;
  });
}

inline MatterSector build_matter_sector(const MetricBundle& mb, const TensorField<1>& phi, double mass,
                                        StressForm form = StressForm::SqrtOutside) {
  using enum Variance;
  require_same_grid(phi, mb.g, "build_matter_sector");
  if (phi.slots()[0] != Down) throw IndexError("matter field must be a covector");
  const Grid& grid = mb.grid();
  MatterSector ms;
  ms.metric = mb;
  ms.mass = mass;
  ms.phi = phi;
  ms.dphi = gradient(phi);
  ms.dphi_cov = covariant_derivative(phi, mb);
  ms.lagrangian = ScalarField(grid, {});
  ms.h_phi = TensorField<2>(grid, {Up, Up});
  ms.h_g = TensorField<3>(grid, {Up, Up, Up});
  for (std::size_t p = 0; p < grid.points(); ++p) {
    const auto mp = matter_point(point_geometry_at(mb, p), phi.at(p), ms.dphi.at(p), mass);
    ms.lagrangian.value(p, 0) = mp.lagrangian;
    ms.h_phi.set(p, mp.h_phi);
    ms.h_g.set(p, mp.h_g);
  }

  SpinStructure spin;
  spin.add(SpinStructure::Block::Covector).add(SpinStructure::Block::CovariantTensor2);
  ms.vb = build_variational(VectorMatterDensity(mass), matter_components(phi, mb.g), spin);
  ms.g_vec = make_field<1>(grid, {Up}, [&](std::size_t p) {
    Tensor<1> v;
    for (int a = 0; a < 4; ++a) v(a) = ms.vb.g_euler.value(p, a);
    return v;
  });
  ms.m_stress = matrix_block(ms.vb.g_euler, 4, {Up, Up});
  ms.g_vec_closed = closed_vector_euler(ms);
  ms.m_closed = closed_stress(ms, form);

  ms.em = make_field<2>(grid, {Up, Down}, [&](std::size_t p) {
    const auto h = ms.h_phi.at(p);
    const auto d = ms.dphi.at(p);
    Matrix4 e;
    for (int m = 0; m < 4; ++m)
      for (int s = 0; s < 4; ++s) {
        double v = -delta(m, s) * ms.lagrangian.value(p, 0);
        for (int a = 0; a < 4; ++a) v += h(a, m) * d(a, s);
        e(m, s) = v;
      }
    return e;
  });
  const auto hdg = contract_with_metric_gradient(ms.h_g, mb.dg);
  ms.e1 = add(ms.em, hdg);

  const auto k_metric = k_from_h(ms.h_g, mb.g);
  ms.k1 = make_field<3>(grid, {Up, Up, Down}, [&](std::size_t p) {
    Tensor<3> k = k_metric.at(p);
    const auto h = ms.h_phi.at(p);
    for (int m = 0; m < 4; ++m)
      for (int a = 0; a < 4; ++a)
        for (int l = 0; l < 4; ++l) k(m, a, l) += h(a, m) * phi.value(p, l);
    return k;
  });
  return ms;
}

// ---------------------------------------------------------------------------
// Identities

/// G^a phi_{a,sigma}.
inline TensorField<1> vector_euler_times_gradient(const MatterSector& ms) {
  return make_field<1>(ms.grid(), {Variance::Down}, [&](std::size_t p) {
    const auto d = ms.dphi.at(p);
    Tensor<1> r;
    for (int s = 0; s < 4; ++s)
      for (int a = 0; a < 4; ++a) r(s) += ms.g_vec.value(p, a) * d(a, s);
    return r;
  });
}

/// G^mu phi_sigma, the matter part of G S^mu_sigma.
inline TensorField<2> vector_euler_spin(const MatterSector& ms) {
  return make_field<2>(ms.grid(), {Variance::Up, Variance::Down}, [&](std::size_t p) {
    Matrix4 r;
    for (int m = 0; m < 4; ++m)
      for (int s = 0; s < 4; ++s) r(m, s) = ms.g_vec.value(p, m) * ms.phi.value(p, s);
    return r;
  });
}

/// d_mu E_1^mu_sigma + G^a phi_{a,sigma} + M^{ab} g_{ab,sigma}.
inline Residual<1> matter_translation(const MatterSector& ms) {
  const auto div = divergence(ms.e1, 0);
  const auto gphi = vector_euler_times_gradient(ms);
  const auto mdg = euler_times_metric_gradient(ms.m_stress, ms.metric.dg);
  return combine<1>({{1.0, &div}, {1.0, &gphi}, {1.0, &mdg}});
}

/// E_M + G S + d_l(H^l S^mu_sigma) + 2 M^{mu b} g_{b sigma} + H_M^{ab,mu} g_{ab,sigma}
/// + 2 d_l[H_M^{mu b,l} g_{b sigma}].
inline Residual<2> matter_energy_identity(const MatterSector& ms) {
  using enum Variance;
  const Grid& grid = ms.grid();
  const auto gs = vector_euler_spin(ms);
  const auto hs = make_field<3>(grid, {Up, Up, Down}, [&](std::size_t p) {
    const auto h = ms.h_phi.at(p);
    Tensor<3> x;  // [l][mu][sigma] = H^{mu,l} phi_sigma
    for (int l = 0; l < 4; ++l)
      for (int m = 0; m < 4; ++m)
        for (int s = 0; s < 4; ++s) x(l, m, s) = h(m, l) * ms.phi.value(p, s);
    return x;
  });
  const auto hg = make_field<3>(grid, {Up, Up, Down}, [&](std::size_t p) {
    const auto h = ms.h_g.at(p);
    const auto g = ms.metric.g.at(p);
    Tensor<3> x;  // [l][mu][sigma] = H_M^{mu b,l} g_{b sigma}
    for (int l = 0; l < 4; ++l)
      for (int m = 0; m < 4; ++m)
        for (int s = 0; s < 4; ++s) {
          double v = 0.0;
          for (int b = 0; b < 4; ++b) v += h(m, b, l) * g(b, s);
          x(l, m, s) = v;
        }
    return x;
  });
  const auto div_hs = divergence(hs, 0);
  const auto div_hg = divergence(hg, 0);
  const auto mg = lower_second_with(ms.m_stress, ms.metric.g);
  const auto hdg = contract_with_metric_gradient(ms.h_g, ms.metric.dg);
  return combine<2>({{1.0, &ms.em}, {1.0, &gs}, {1.0, &div_hs}, {2.0, &mg}, {1.0, &hdg}, {2.0, &div_hg}});
}

/// d_b[G^b phi_l + 2 M^{ba} g_{al}] - G^a phi_{a,l} - M^{ab} g_{ab,l}.
inline Residual<1> matter_gauge_identity(const MatterSector& ms) {
  const auto gs = vector_euler_spin(ms);
  const auto mg = lower_second_with(ms.m_stress, ms.metric.g);
  const auto div_gs = divergence(gs, 0);
  const auto div_mg = divergence(mg, 0);
  const auto gphi = vector_euler_times_gradient(ms);
  const auto mdg = euler_times_metric_gradient(ms.m_stress, ms.metric.dg);
  return combine<1>({{1.0, &div_gs}, {2.0, &div_mg}, {-1.0, &gphi}, {-1.0, &mdg}});
}

/// 2 d_b(M^{ba} g_{al}) - M^{ab} g_{ab,l}: zero when the matter equation holds.
inline Residual<1> stress_bianchi(const MatterSector& ms) {
  const auto mg = lower_second_with(ms.m_stress, ms.metric.g);
  const auto div = divergence(mg, 0);
  const auto mdg = euler_times_metric_gradient(ms.m_stress, ms.metric.dg);
  return combine<1>({{2.0, &div}, {-1.0, &mdg}});
}

/// Part of K_1^{mu a}_lambda symmetric in (mu, a); vanishes pointwise.
inline Residual<3> k1_symmetric_part(const MatterSector& ms) {
  const auto kt = make_field<3>(ms.grid(), ms.k1.slots(), [&](std::size_t p) {
    const auto k = ms.k1.at(p);
    Tensor<3> s;
    for (int m = 0; m < 4; ++m)
      for (int a = 0; a < 4; ++a)
        for (int l = 0; l < 4; ++l) s(m, a, l) = k(a, m, l);
    return s;
  });
  auto r = combine<3>({{0.5, &ms.k1}, {0.5, &kt}});
  r.scale = linf(ms.k1);
  return r;
}

// ---------------------------------------------------------------------------
// Pointwise oracles

/// H_M^{a,mu} against numeric differentiation of L_M in phi_{a,mu}.
inline double h_phi_oracle(const MatterSector& ms, std::size_t p, double rel_step = 1e-6) {
  const auto pg = point_geometry_at(ms.metric, p);
  const auto phi = ms.phi.at(p);
  const auto d0 = ms.dphi.at(p);
  const auto h = ms.h_phi.at(p);
  double err = 0.0, scale = linf(ms.h_phi);
  for (int a = 0; a < 4; ++a)
    for (int m = 0; m < 4; ++m) {
      const double st = rel_step * std::max(1.0, std::abs(d0(a, m)));
      Matrix4 up = d0, dn = d0;
      up(a, m) += st;
      dn(a, m) -= st;
      const double fp = matter_lagrangian_point(pg, phi, covariant_derivative_point(pg, phi, up), ms.mass);
      const double fm = matter_lagrangian_point(pg, phi, covariant_derivative_point(pg, phi, dn), ms.mass);
      const double num = (fp - fm) / (2.0 * st);
      scale = std::max(scale, std::abs(num));
      err = std::max(err, std::abs(num - h(a, m)));
    }
  return err / std::max(scale, 1e-30);
}

/// H_M^{ab,mu} against numeric differentiation of L_M in g_{ab,mu}.
inline double h_g_oracle(const MatterSector& ms, std::size_t p, double rel_step = 1e-6) {
  const auto& mb = ms.metric;
  const auto g = mb.g.at(p);
  const auto inv = invert_metric(g);
  const auto phi = ms.phi.at(p);
  const auto d0 = ms.dphi.at(p);
  const auto num = metric_gradient_partial(
      [&](const Tensor<3>& dg) {
        const auto pg = point_geometry(g, inv.inverse, inv.sqrt_g, dg);
        return matter_lagrangian_point(pg, phi, covariant_derivative_point(pg, phi, d0), ms.mass);
      },
      mb.dg.at(p), rel_step);
  const auto h = ms.h_g.at(p);
  double err = 0.0, scale = linf(ms.h_g);
  for (std::size_t i = 0; i < num.c.size(); ++i) {
    err = std::max(err, std::abs(num.c[i] - h.c[i]));
    scale = std::max(scale, std::abs(num.c[i]));
  }
  return err / std::max(scale, 1e-30);
}

}  // namespace gravitensor
