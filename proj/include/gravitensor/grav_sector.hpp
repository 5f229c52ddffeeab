#pragma once

#include <cstddef>

#include "gravitensor/geometry.hpp"
#include "gravitensor/lagrangians.hpp"
#include "gravitensor/residual.hpp"
#include "gravitensor/variational.hpp"

namespace gravitensor {

/// The sqrt(g) K sector on one metric.
struct GravSector {
  MetricBundle metric;
  VariationalBundle vb;       // engine run on the dense metric, spin = covariant 2-tensor
  TensorField<3> h0;          // H_0^{ab,mu}                 [a][b][mu]
  TensorField<2> g0;          // G_0^{ab}, Euler derivative
  TensorField<2> g0_einstein; // -sqrt(g)(R^{ab} - 1/2 g^{ab} R)
  TensorField<2> e0;          // E_0^mu_sigma = H_0 g_{,sigma} - delta sqrt(g) K
  TensorField<2> e0_h;        // E_0 from h-derivatives
  TensorField<3> k0;          // K_0^{mu alpha}_lambda = 2 H_0^{alpha b,mu} g_{b lambda}
  TensorField<3> w0;          // W_0^{l m a} from stencils on h
  TensorField<2> t;           // t^{m a} = d_l W_0^{l m a}

  const Grid& grid() const { return metric.grid(); }
};

inline TensorField<3> h0_field(const MetricBundle& mb) {
  using enum Variance;
  return make_field<3>(mb.grid(), {Up, Up, Up}, [&](std::size_t p) {
    return gravity_h0(point_geometry(mb.g.at(p), mb.g_inv.at(p), mb.sqrt_g.value(p, 0), mb.dg.at(p)));
  });
}

/// Dense 16-component block starting at `off` as a rank-2 field.
inline TensorField<2> matrix_block(const ComponentField& f, std::size_t off, Slots<2> slots) {
  TensorField<2> out(f.grid(), slots);
  for (std::size_t p = 0; p < f.points(); ++p)
    for (int i = 0; i < 16; ++i) out.value(p, i) = f.value(p, off + i);
  return out;
}

/// sum_{ab} X^{ab,mu} g_{ab,sigma} for a rank-3 [a][b][mu] field.
inline TensorField<2> contract_with_metric_gradient(const TensorField<3>& x, const TensorField<3>& dg) {
  return make_field<2>(x.grid(), {Variance::Up, Variance::Down}, [&](std::size_t p) {
    const auto h = x.at(p);
    const auto d = dg.at(p);
    Matrix4 e;
    for (int m = 0; m < 4; ++m)
      for (int s = 0; s < 4; ++s) {
        double v = 0.0;
        for (int a = 0; a < 4; ++a)
          for (int b = 0; b < 4; ++b) v += h(a, b, m) * d(a, b, s);
        e(m, s) = v;
      }
    return e;
  });
}

/// sum_{ab} G^{ab} g_{ab,sigma}.
inline TensorField<1> euler_times_metric_gradient(const TensorField<2>& g_ab, const TensorField<3>& dg) {
  return make_field<1>(g_ab.grid(), {Variance::Down}, [&](std::size_t p) {
    const auto gg = g_ab.at(p);
    const auto d = dg.at(p);
    Tensor<1> r;
    for (int s = 0; s < 4; ++s)
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) r(s) += gg(a, b) * d(a, b, s);
    return r;
  });
}

/// X^{mu b} g_{b sigma} for a contravariant rank-2 field.
inline TensorField<2> lower_second_with(const TensorField<2>& x, const SymmetricField& g) {
  return make_field<2>(x.grid(), {Variance::Up, Variance::Down}, [&](std::size_t p) { return matmul(x.at(p), g.at(p)); });
}

/// K^{mu alpha}_lambda = 2 X^{alpha b,mu} g_{b lambda}.
inline TensorField<3> k_from_h(const TensorField<3>& x, const SymmetricField& g) {
  using enum Variance;
  return make_field<3>(x.grid(), {Up, Up, Down}, [&](std::size_t p) {
    const auto h = x.at(p);
    const auto gm = g.at(p);
    Tensor<3> k;
    for (int m = 0; m < 4; ++m)
      for (int a = 0; a < 4; ++a)
        for (int l = 0; l < 4; ++l) {
          double v = 0.0;
          for (int b = 0; b < 4; ++b) v += h(a, b, m) * gm(b, l);
          k(m, a, l) = 2.0 * v;
        }
    return k;
  });
}

/// E_0 = Gamma^b_{ab} d_sigma h^{a mu} - Gamma^mu_{ab} d_sigma h^{ab} - delta sqrt(g) K.
inline TensorField<2> e0_h_form(const MetricBundle& mb) {
  return make_field<2>(mb.grid(), {Variance::Up, Variance::Down}, [&](std::size_t p) {
    const auto gam = mb.conn.gamma.at(p);
    const auto dh = mb.dh_up.at(p);
    const double lk = mb.curv.k_scalar.value(p, 0) * mb.sqrt_g.value(p, 0);
    Tensor<1> tr;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) tr(a) += gam(b, a, b);
    Matrix4 e;
    for (int m = 0; m < 4; ++m)
      for (int s = 0; s < 4; ++s) {
        double v = 0.0;
        for (int a = 0; a < 4; ++a) {
          v += tr(a) * dh(a, m, s);
          for (int b = 0; b < 4; ++b) v -= gam(m, a, b) * dh(a, b, s);
        }
        e(m, s) = v - delta(m, s) * lk;
      }
    return e;
  });
}

/// W_0^{l m a} = d_s[eta^{as} h^{ml} + eta^{ms} h^{al} - eta^{ma} h^{sl} - eta^{sl} h^{ma}],
/// every derivative a stencil applied to h^{ab}.
inline TensorField<3> w0_field(const MetricBundle& mb) {
  using enum Variance;
  const auto dh = gradient(mb.h_up);  // [a][b][s]
  return make_field<3>(mb.grid(), {Up, Up, Up}, [&](std::size_t p) {
    const auto d = dh.at(p);
    Tensor<3> w;
    for (int l = 0; l < 4; ++l)
      for (int m = 0; m < 4; ++m)
        for (int a = 0; a < 4; ++a) {
          double v = kEtaDiag[a] * d(m, l, a) + kEtaDiag[m] * d(a, l, m) - kEtaDiag[l] * d(m, a, l);
          if (m == a)
            for (int s = 0; s < 4; ++s) v -= kEtaDiag[m] * d(s, l, s);
          w(l, m, a) = v;
        }
    return w;
  });
}

inline GravSector build_grav_sector(const MetricBundle& mb) {
  using enum Variance;
  GravSector gs;
  gs.metric = mb;
  gs.vb = build_variational(GravityDensity{}, metric_components(mb.g), SpinStructure::metric());
  gs.h0 = h0_field(mb);
  gs.g0 = matrix_block(gs.vb.g_euler, 0, {Up, Up});
  gs.g0_einstein = make_field<2>(mb.grid(), {Up, Up}, [&](std::size_t p) {
    return -mb.sqrt_g.value(p, 0) * mb.curv.einstein_up.at(p);
  });
  const auto h0g = contract_with_metric_gradient(gs.h0, mb.dg);
  gs.e0 = make_field<2>(mb.grid(), {Up, Down}, [&](std::size_t p) {
    Matrix4 e = h0g.at(p);
    const double lk = mb.curv.k_scalar.value(p, 0) * mb.sqrt_g.value(p, 0);
    for (int m = 0; m < 4; ++m) e(m, m) -= lk;
    return e;
  });
  gs.e0_h = e0_h_form(mb);
  gs.k0 = k_from_h(gs.h0, mb.g);
  gs.w0 = w0_field(mb);
  gs.t = divergence(gs.w0, 0);
  return gs;
}

// ---------------------------------------------------------------------------
// Identities

/// d_mu E_0^mu_sigma + G_0^{ab} g_{ab,sigma}.
inline Residual<1> grav_translation(const GravSector& gs) {
  const auto div_e = divergence(gs.e0, 0);
  const auto gdg = euler_times_metric_gradient(gs.g0, gs.metric.dg);
  return combine<1>({{1.0, &div_e}, {1.0, &gdg}});
}

/// d_a d_b K_0^{ab}_lambda; the reference scale is |d_a K_0^{ab}_lambda|.
inline Residual<1> grav_double_divergence(const GravSector& gs) {
  const auto div_k = divergence(gs.k0, 0);
  return {divergence(div_k, 0), linf(div_k)};
}

/// E_0^mu_sigma + 2 G_0^{mu a} g_{a sigma} + d_l K_0^{l mu}_sigma.
inline Residual<2> grav_energy_identity(const GravSector& gs) {
  const auto gg = lower_second_with(gs.g0, gs.metric.g);
  const auto div_k = divergence(gs.k0, 0);
  return combine<2>({{1.0, &gs.e0}, {2.0, &gg}, {1.0, &div_k}});
}

/// 2 d_b(G_0^{ba} g_{a lambda}) - G_0^{ab} g_{ab,lambda}, with G_0 in Einstein form.
inline Residual<1> grav_bianchi(const GravSector& gs) {
  const auto gg = lower_second_with(gs.g0_einstein, gs.metric.g);
  const auto div = divergence(gg, 0);
  const auto gdg = euler_times_metric_gradient(gs.g0_einstein, gs.metric.dg);
  return combine<1>({{2.0, &div}, {-1.0, &gdg}});
}

/// 1/2 (K_0^{ab}_l + K_0^{ba}_l) - d_m[1/2 delta^a_l h^{mb} + 1/2 delta^b_l h^{ma} - delta^m_l h^{ab}].
inline Residual<3> grav_symmetrized_k0(const GravSector& gs) {
  using enum Variance;
  const auto dh = gradient(gs.metric.h_up);  // [a][b][m]
  const auto sym = make_field<3>(gs.grid(), {Up, Up, Down}, [&](std::size_t p) {
    const auto k = gs.k0.at(p);
    Tensor<3> s;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int l = 0; l < 4; ++l) s(a, b, l) = 0.5 * (k(a, b, l) + k(b, a, l));
    return s;
  });
  const auto rhs = make_field<3>(gs.grid(), {Up, Up, Down}, [&](std::size_t p) {
    const auto d = dh.at(p);
    Tensor<3> s;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int l = 0; l < 4; ++l) {
          double v = -d(a, b, l);
          for (int m = 0; m < 4; ++m) v += 0.5 * delta(a, l) * d(m, b, m) + 0.5 * delta(b, l) * d(m, a, m);
          s(a, b, l) = v;
        }
    return s;
  });
  return combine<3>({{1.0, &sym}, {-1.0, &rhs}});
}

/// d_mu t^{mu a}.
inline Residual<1> grav_t_divergence(const GravSector& gs) { return {divergence(gs.t, 0), linf(gs.t)}; }

/// W_0 from h-stencils minus W built by the engine from K_0.
inline Residual<3> grav_w_consistency(const GravSector& gs) {
  return combine<3>({{1.0, &gs.w0}, {-1.0, &gs.vb.w}});
}

/// Closed-form dB^mu/dg_{ar,b} g_{r l} = -delta^a_l h^{mb} + 1/2 delta^b_l h^{ma} + 1/2 delta^m_l h^{ab},
/// as [mu][a][b][l] flattened into two rank-3 lookups by the caller.
inline double boundary_partial_closed(const Matrix4& h, int mu, int a, int b, int l) {
  return -delta(a, l) * h(mu, b) + 0.5 * delta(b, l) * h(mu, a) + 0.5 * delta(mu, l) * h(a, b);
}

/// Pointwise oracle for the boundary-vector gradient partial at one point:
/// max over all indices of |closed - numeric| / max(|numeric|_inf, |h|_inf).
inline double boundary_partial_oracle(const MetricBundle& mb, std::size_t p, double rel_step = 1e-6) {
  const auto g = mb.g.at(p);
  const auto inv = invert_metric(g);
  const auto dg = mb.dg.at(p);
  const auto h = mb.h_up.at(p);
  double err = 0.0, scale = 0.0;
  for (int i = 0; i < 16; ++i) scale = std::max(scale, std::abs(h.c[i]));
  for (int mu = 0; mu < 4; ++mu) {
    const auto db = metric_gradient_partial(
        [&](const Tensor<3>& d) { return point_geometry(g, inv.inverse, inv.sqrt_g, d).b(mu); }, dg, rel_step);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int l = 0; l < 4; ++l) {
          double num = 0.0;
          for (int r = 0; r < 4; ++r) num += db(a, r, b) * g(r, l);
          scale = std::max(scale, std::abs(num));
          err = std::max(err, std::abs(num - boundary_partial_closed(h, mu, a, b, l)));
        }
  }
  return err / std::max(scale, 1e-30);
}

/// Pointwise oracle for H_0 at one point.
inline double h0_oracle(const GravSector& gs, std::size_t p, double rel_step = 1e-6) {
  const auto& mb = gs.metric;
  const auto g = mb.g.at(p);
  const auto inv = invert_metric(g);
  const auto num = metric_gradient_partial(
      [&](const Tensor<3>& d) {
        const auto pg = point_geometry(g, inv.inverse, inv.sqrt_g, d);
        return pg.sqrt_g * pg.k_scalar;
      },
      mb.dg.at(p), rel_step);
  const auto h = gs.h0.at(p);
  double err = 0.0, scale = 1e-30;
  for (std::size_t i = 0; i < num.c.size(); ++i) {
    err = std::max(err, std::abs(num.c[i] - h.c[i]));
    scale = std::max(scale, std::abs(num.c[i]));
  }
  return err / std::max(scale, linf(gs.h0));
}

}  // namespace gravitensor
