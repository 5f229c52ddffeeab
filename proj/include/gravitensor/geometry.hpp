#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>

#include "gravitensor/error.hpp"
#include "gravitensor/field.hpp"
#include "gravitensor/index_algebra.hpp"
#include "gravitensor/residual.hpp"
#include "gravitensor/stencil.hpp"

namespace gravitensor {

inline constexpr double kDegeneracyThreshold = 1e-10;

// ---------------------------------------------------------------------------
// Pointwise kernels. Everything in this block depends only on the metric and
// its first derivatives at one point, so the Lagrangian densities reuse it.

struct MetricInverse {
  Matrix4 inverse;
  double determinant = 0.0;  // Det(g_{mu nu}), negative for Lorentz signature
  double sqrt_g = 0.0;       // sqrt(-det)
};

/// Number of positive and negative eigenvalues of a symmetric 4x4 matrix.
inline std::pair<int, int> signature_counts(const Matrix4& g) {
  Eigen::Matrix4d m;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) m(a, b) = g(a, b);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(m, Eigen::EigenvaluesOnly);
  int pos = 0, neg = 0;
  for (int i = 0; i < 4; ++i) {
    if (es.eigenvalues()(i) > 0.0) ++pos;
    if (es.eigenvalues()(i) < 0.0) ++neg;
  }
  return {pos, neg};
}

inline bool is_lorentzian(const Matrix4& g) {
  const auto [pos, neg] = signature_counts(g);
  return pos == 1 && neg == 3;
}

/// Inverse and volume factor; no validation.
inline MetricInverse invert_metric(const Matrix4& g) {
  Eigen::Matrix4d m;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) m(a, b) = g(a, b);
  MetricInverse r;
  r.determinant = m.determinant();
  const Eigen::Matrix4d inv = m.inverse();
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) r.inverse(a, b) = 0.5 * (inv(a, b) + inv(b, a));
  r.sqrt_g = std::sqrt(-r.determinant);
  return r;
}

/// Connection and quadratic curvature quantities at a point.
struct PointGeometry {
  Matrix4 g;
  Matrix4 gi;
  double sqrt_g = 1.0;
  Tensor<3> dg;           // g_{ab,mu}
  Tensor<3> gamma_lower;  // Gamma_{mu alpha beta}
  Tensor<3> gamma;        // Gamma^mu_{alpha beta}
  Tensor<3> gamma_up2;    // Gamma^{mu sigma}_beta = g^{sigma alpha} Gamma^mu_{alpha beta}
  Tensor<3> gamma_up3;    // Gamma^{mu sigma rho} = g^{rho beta} Gamma^{mu sigma}_beta
  Matrix4 k_tensor;       // K_{mu nu}
  double k_scalar = 0.0;  // K = g^{mu nu} K_{mu nu}
  Tensor<1> b;            // B^mu
};

inline Tensor<3> lower_christoffel(const Tensor<3>& dg) {
  Tensor<3> gl;
  for (int m = 0; m < 4; ++m)
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) gl(m, a, b) = 0.5 * (dg(m, a, b) + dg(m, b, a) - dg(a, b, m));
  return gl;
}

inline PointGeometry point_geometry(const Matrix4& g, const Matrix4& gi, double sqrt_g, const Tensor<3>& dg) {
  PointGeometry pg;
  pg.g = g;
  pg.gi = gi;
  pg.sqrt_g = sqrt_g;
  pg.dg = dg;
  pg.gamma_lower = lower_christoffel(dg);
  for (int m = 0; m < 4; ++m)
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        double s = 0.0;
        for (int k = 0; k < 4; ++k) s += gi(m, k) * pg.gamma_lower(k, a, b);
        pg.gamma(m, a, b) = s;
      }
  for (int m = 0; m < 4; ++m)
    for (int s = 0; s < 4; ++s)
      for (int b = 0; b < 4; ++b) {
        double v = 0.0;
        for (int a = 0; a < 4; ++a) v += gi(s, a) * pg.gamma(m, a, b);
        pg.gamma_up2(m, s, b) = v;
      }
  for (int m = 0; m < 4; ++m)
    for (int s = 0; s < 4; ++s)
      for (int r = 0; r < 4; ++r) {
        double v = 0.0;
        for (int b = 0; b < 4; ++b) v += gi(r, b) * pg.gamma_up2(m, s, b);
        pg.gamma_up3(m, s, r) = v;
      }
  // K_{mu nu} = Gamma^b_{mu a} Gamma^a_{nu b} - Gamma^a_{mu nu} Gamma^b_{a b}
  Tensor<1> trace;  // Gamma^b_{a b}
  for (int a = 0; a < 4; ++a) {
    double v = 0.0;
    for (int b = 0; b < 4; ++b) v += pg.gamma(b, a, b);
    trace(a) = v;
  }
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n) {
      double v = 0.0;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) v += pg.gamma(b, m, a) * pg.gamma(a, n, b);
      for (int a = 0; a < 4; ++a) v -= pg.gamma(a, m, n) * trace(a);
      pg.k_tensor(m, n) = v;
    }
  pg.k_scalar = trace_product(gi, pg.k_tensor);
  // B^mu = sqrt(g) [Gamma^{mu a}_a - Gamma^{a mu}_a]
  for (int m = 0; m < 4; ++m) {
    double v = 0.0;
    for (int a = 0; a < 4; ++a) v += pg.gamma_up2(m, a, a) - pg.gamma_up2(a, m, a);
    pg.b(m) = sqrt_g * v;
  }
  return pg;
}

inline PointGeometry point_geometry(const Matrix4& g, const Tensor<3>& dg) {
  const auto inv = invert_metric(g);
  return point_geometry(g, inv.inverse, inv.sqrt_g, dg);
}

// ---------------------------------------------------------------------------
// Field-level operations

struct InverseAndVolume {
  SymmetricField g_inv;
  ScalarField sqrt_g;
};

/// Pointwise inverse and sqrt(-det g). Throws GeometryError at the first
/// degenerate or non-Lorentzian point.
inline InverseAndVolume metric_inverse_and_volume(const SymmetricField& g) {
  if (g.variance() != Variance::Down) throw IndexError("metric must be covariant");
  InverseAndVolume out{SymmetricField(g.grid(), Variance::Up), ScalarField(g.grid(), {})};
  for (std::size_t p = 0; p < g.points(); ++p) {
    const auto m = g.at(p);
    const auto inv = invert_metric(m);
    if (!std::isfinite(inv.determinant) || std::abs(inv.determinant) < kDegeneracyThreshold)
      throw GeometryError("degenerate metric", p, g.grid().coords(p));
    if (!is_lorentzian(m)) throw GeometryError("metric lost Lorentz signature (+,-,-,-)", p, g.grid().coords(p));
    out.g_inv.set(p, inv.inverse);
    out.sqrt_g.value(p, 0) = inv.sqrt_g;
  }
  return out;
}

struct Connection {
  TensorField<3> lower;  // Gamma_{mu alpha beta}
  TensorField<3> gamma;  // Gamma^mu_{alpha beta}
  TensorField<3> up2;    // Gamma^{mu sigma}_beta
  TensorField<3> up3;    // Gamma^{mu sigma rho}
};

struct QuadraticCurvature {
  TensorField<2> k_tensor;  // K_{mu nu}
  ScalarField k_scalar;     // K
  TensorField<1> b;         // B^mu
};

namespace detail {

inline void fill_point_quantities(const SymmetricField& g, const SymmetricField& g_inv, const ScalarField& sqrt_g,
                                  const TensorField<3>& dg, Connection& conn, QuadraticCurvature& quad) {
  using enum Variance;
  const Grid& grid = g.grid();
  conn = {TensorField<3>(grid, {Down, Down, Down}), TensorField<3>(grid, {Up, Down, Down}),
          TensorField<3>(grid, {Up, Up, Down}), TensorField<3>(grid, {Up, Up, Up})};
  quad = {TensorField<2>(grid, {Down, Down}), ScalarField(grid, {}), TensorField<1>(grid, {Up})};
  for (std::size_t p = 0; p < grid.points(); ++p) {
    const auto pg = point_geometry(g.at(p), g_inv.at(p), sqrt_g.value(p, 0), dg.at(p));
    conn.lower.set(p, pg.gamma_lower);
    conn.gamma.set(p, pg.gamma);
    conn.up2.set(p, pg.gamma_up2);
    conn.up3.set(p, pg.gamma_up3);
    quad.k_tensor.set(p, pg.k_tensor);
    quad.k_scalar.value(p, 0) = pg.k_scalar;
    quad.b.set(p, pg.b);
  }
}

}  // namespace detail

/// All four index placements of the Christoffel symbols.
inline Connection connection(const SymmetricField& g, const SymmetricField& g_inv, const ScalarField& sqrt_g,
                             const TensorField<3>& dg) {
  Connection conn;
  QuadraticCurvature quad;
  detail::fill_point_quantities(g, g_inv, sqrt_g, dg, conn, quad);
  return conn;
}

/// B^mu = sqrt(g) [Gamma^{mu a}_a - Gamma^{a mu}_a].
inline TensorField<1> boundary_vector(const ScalarField& sqrt_g, const Connection& conn) {
  return make_field<1>(sqrt_g.grid(), {Variance::Up}, [&](std::size_t p) {
    const auto up2 = conn.up2.at(p);
    Tensor<1> b;
    for (int m = 0; m < 4; ++m) {
      double v = 0.0;
      for (int a = 0; a < 4; ++a) v += up2(m, a, a) - up2(a, m, a);
      b(m) = sqrt_g.value(p, 0) * v;
    }
    return b;
  });
}

struct Curvature {
  TensorField<2> k_tensor;        // K_{mu nu}
  ScalarField k_scalar;           // K
  TensorField<2> k_up;            // K^{alpha beta}
  TensorField<2> ricci;           // R_{mu nu}
  TensorField<2> ricci_mixed;     // R^alpha_nu
  TensorField<2> ricci_up;        // R^{alpha beta}
  ScalarField r_scalar;           // R
  TensorField<2> einstein;        // H_{mu nu} = R_{mu nu} - 1/2 g_{mu nu} R
  TensorField<2> einstein_mixed;  // H^alpha_nu
  TensorField<2> einstein_up;     // H^{alpha beta}
};

/// Curvature from the connection. The Ricci tensor uses
/// R_{mu nu} = d_a Gamma^a_{mu nu} - d_nu Gamma^a_{a mu} - K_{mu nu}, with the
/// stencil applied to the Gamma fields themselves.
inline Curvature curvature(const SymmetricField& g, const SymmetricField& g_inv, const Connection& conn) {
  using enum Variance;
  const Grid& grid = g.grid();
  Curvature c;
  c.k_tensor = TensorField<2>(grid, {Down, Down});
  c.k_scalar = ScalarField(grid, {});
  c.k_up = TensorField<2>(grid, {Up, Up});
  for (std::size_t p = 0; p < grid.points(); ++p) {
    const auto gam = conn.gamma.at(p);
    Tensor<1> trace;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) trace(a) += gam(b, a, b);
    Matrix4 k;
    for (int m = 0; m < 4; ++m)
      for (int n = 0; n < 4; ++n) {
        double v = 0.0;
        for (int a = 0; a < 4; ++a)
          for (int b = 0; b < 4; ++b) v += gam(b, m, a) * gam(a, n, b);
        for (int a = 0; a < 4; ++a) v -= gam(a, m, n) * trace(a);
        k(m, n) = v;
      }
    const auto gi = g_inv.at(p);
    c.k_tensor.set(p, k);
    c.k_scalar.value(p, 0) = trace_product(gi, k);
    c.k_up.set(p, matmul(matmul(gi, k), gi));
  }

  const auto div_gamma = divergence(conn.gamma, 0);                 // d_a Gamma^a_{mu nu}
  const auto grad_trace = gradient(contract(conn.gamma, 0, 1));     // d_nu Gamma^a_{a mu}  [mu][nu]
  c.ricci = TensorField<2>(grid, {Down, Down});
  c.ricci_mixed = TensorField<2>(grid, {Up, Down});
  c.ricci_up = TensorField<2>(grid, {Up, Up});
  c.r_scalar = ScalarField(grid, {});
  c.einstein = TensorField<2>(grid, {Down, Down});
  c.einstein_mixed = TensorField<2>(grid, {Up, Down});
  c.einstein_up = TensorField<2>(grid, {Up, Up});
  for (std::size_t p = 0; p < grid.points(); ++p) {
    const auto d = div_gamma.at(p);
    const auto t = grad_trace.at(p);
    const auto k = c.k_tensor.at(p);
    Matrix4 ric;
    for (int m = 0; m < 4; ++m)
      for (int n = 0; n < 4; ++n) ric(m, n) = d(m, n) - t(m, n) - k(m, n);
    const auto gi = g_inv.at(p);
    const auto gm = g.at(p);
    const auto ric_mixed = matmul(gi, ric);
    const auto ric_up = matmul(ric_mixed, gi);  // R^{ab} = g^{b nu} R^a_nu
    const double r = trace_product(gi, ric);
    Matrix4 ein;
    for (int m = 0; m < 4; ++m)
      for (int n = 0; n < 4; ++n) ein(m, n) = ric(m, n) - 0.5 * gm(m, n) * r;
    const auto ein_mixed = matmul(gi, ein);
    c.ricci.set(p, ric);
    c.ricci_mixed.set(p, ric_mixed);
    c.ricci_up.set(p, ric_up);
    c.r_scalar.value(p, 0) = r;
    c.einstein.set(p, ein);
    c.einstein_mixed.set(p, ein_mixed);
    c.einstein_up.set(p, matmul(ein_mixed, gi));
  }
  return c;
}

/// Metric field together with every quantity derived from it. Built once,
/// then read-only.
struct MetricBundle {
  SymmetricField g;
  SymmetricField g_inv;
  ScalarField sqrt_g;
  TensorField<3> dg;  // g_{ab,mu}
  Connection conn;
  Curvature curv;
  TensorField<1> b;  // B^mu

  // density-weighted metric and its chain-rule derivatives
  SymmetricField h_up;     // h^{ab} = sqrt(g) g^{ab}
  SymmetricField h_down;   // h_{ab} = g_{ab} / sqrt(g)
  TensorField<3> dh_up;    // d_l h^{ab}, chain rule through dg   [a][b][l]
  TensorField<3> dh_down;  // d_l h_{ab}, chain rule through dg   [a][b][l]

  const Grid& grid() const { return g.grid(); }
};

namespace detail {

inline void fill_h_quantities(MetricBundle& mb) {
  using enum Variance;
  const Grid& grid = mb.grid();
  mb.h_up = SymmetricField(grid, Up);
  mb.h_down = SymmetricField(grid, Down);
  mb.dh_up = TensorField<3>(grid, {Up, Up, Down});
  mb.dh_down = TensorField<3>(grid, {Down, Down, Down});
  for (std::size_t p = 0; p < grid.points(); ++p) {
    const auto gi = mb.g_inv.at(p);
    const auto gm = mb.g.at(p);
    const double sg = mb.sqrt_g.value(p, 0);
    const auto dg = mb.dg.at(p);
    mb.h_up.set(p, sg * gi);
    mb.h_down.set(p, (1.0 / sg) * gm);
    Tensor<3> dhu, dhd;
    for (int l = 0; l < 4; ++l) {
      double tr = 0.0;  // g^{cd} g_{cd,l} = 2 d_l ln sqrt(g)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) tr += gi(c, d) * dg(c, d, l);
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          double dgi = 0.0;  // d_l g^{ab}
          for (int c = 0; c < 4; ++c)
            for (int d = 0; d < 4; ++d) dgi -= gi(a, c) * gi(b, d) * dg(c, d, l);
          dhu(a, b, l) = sg * (0.5 * tr * gi(a, b) + dgi);
          dhd(a, b, l) = (dg(a, b, l) - 0.5 * tr * gm(a, b)) / sg;
        }
    }
    mb.dh_up.set(p, dhu);
    mb.dh_down.set(p, dhd);
  }
}

}  // namespace detail

/// Full pipeline from a covariant metric field.
inline MetricBundle build_metric_bundle(const SymmetricField& g) {
  MetricBundle mb;
  mb.g = g;
  auto iv = metric_inverse_and_volume(g);
  mb.g_inv = std::move(iv.g_inv);
  mb.sqrt_g = std::move(iv.sqrt_g);
  mb.dg = gradient(g);
  mb.conn = connection(mb.g, mb.g_inv, mb.sqrt_g, mb.dg);
  mb.curv = curvature(mb.g, mb.g_inv, mb.conn);
  mb.b = boundary_vector(mb.sqrt_g, mb.conn);
  detail::fill_h_quantities(mb);
  return mb;
}

// ---------------------------------------------------------------------------
// Identities

/// r = R sqrt(g) - K sqrt(g) - d_mu B^mu.
inline Residual<0> verify_density_decomposition(const MetricBundle& mb) {
  const Grid& grid = mb.grid();
  const auto r_density = make_scalar(grid, [&](std::size_t p) { return mb.curv.r_scalar.value(p, 0) * mb.sqrt_g.value(p, 0); });
  const auto k_density = make_scalar(grid, [&](std::size_t p) { return mb.curv.k_scalar.value(p, 0) * mb.sqrt_g.value(p, 0); });
  const auto div_b = divergence(mb.b, 0);
  return combine<0>({{1.0, &r_density}, {-1.0, &k_density}, {-1.0, &div_b}});
}

/// r_s = d_mu(sqrt(g) H^mu_s) - 1/2 sqrt(g) H^{ab} g_{ab,s}.
inline Residual<1> verify_contracted_bianchi(const MetricBundle& mb) {
  using enum Variance;
  const Grid& grid = mb.grid();
  const auto weighted = make_field<2>(grid, {Up, Down}, [&](std::size_t p) {
    return mb.sqrt_g.value(p, 0) * mb.curv.einstein_mixed.at(p);
  });
  const auto lhs = divergence(weighted, 0);
  const auto rhs = make_field<1>(grid, {Down}, [&](std::size_t p) {
    const auto hu = mb.curv.einstein_up.at(p);
    const auto dg = mb.dg.at(p);
    Tensor<1> r;
    for (int s = 0; s < 4; ++s) {
      double v = 0.0;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) v += hu(a, b) * dg(a, b, s);
      r(s) = 0.5 * mb.sqrt_g.value(p, 0) * v;
    }
    return r;
  });
  return combine<1>({{1.0, &lhs}, {-1.0, &rhs}});
}

/// Quantities of the density-weighted representation and its cross-checks
/// against the connection-based definitions.
struct HRepresentation {
  TensorField<3> a3;          // A^nu_{mu l} = h_{mu b} d_l h^{b nu}       [nu][mu][l]
  TensorField<3> a3_alt;      // -h^{nu b} d_l h_{b mu}
  TensorField<3> a3_gamma;    // delta^nu_mu Gamma^s_{s l} - g^{nu b}(Gamma_{b mu l} + Gamma_{mu b l})
  TensorField<1> a1;          // A_l = A^mu_{mu l}
  TensorField<1> a1_gamma;    // 2 Gamma^s_{s l}
  TensorField<3> gamma_rep;   // Gamma^mu_{nu s} from A-quantities
  ScalarField k_density_rep;  // K sqrt(g) from A-quantities
  ScalarField k_density;      // K sqrt(g) from the definition
  TensorField<1> b_rep;       // B^mu from A-quantities
  TensorField<2> curl_a;      // d_m A_n - d_n A_m for the chain-rule A
  TensorField<1> log_det_gradient;  // d_l ln g by stencil
  TensorField<2> curl_log_det;      // its curl (stencils commute: exactly zero)
};

inline HRepresentation h_representation(const MetricBundle& mb) {
  using enum Variance;
  const Grid& grid = mb.grid();
  HRepresentation r;
  r.a3 = TensorField<3>(grid, {Up, Down, Down});
  r.a3_alt = r.a3.like();
  r.a3_gamma = r.a3.like();
  r.a1 = TensorField<1>(grid, {Down});
  r.a1_gamma = r.a1.like();
  r.gamma_rep = TensorField<3>(grid, {Up, Down, Down});
  r.k_density_rep = ScalarField(grid, {});
  r.k_density = ScalarField(grid, {});
  r.b_rep = TensorField<1>(grid, {Up});
  for (std::size_t p = 0; p < grid.points(); ++p) {
    const auto hu = mb.h_up.at(p);
    const auto hd = mb.h_down.at(p);
    const auto dhu = mb.dh_up.at(p);
    const auto dhd = mb.dh_down.at(p);
    const auto gi = mb.g_inv.at(p);
    const auto gl = mb.conn.lower.at(p);
    const auto gam = mb.conn.gamma.at(p);
    Tensor<3> a3, a3b, a3g;
    for (int n = 0; n < 4; ++n)
      for (int m = 0; m < 4; ++m)
        for (int l = 0; l < 4; ++l) {
          double v = 0.0, w = 0.0, t = 0.0, x = 0.0;
          for (int b = 0; b < 4; ++b) {
            v += hd(m, b) * dhu(b, n, l);
            w -= hu(n, b) * dhd(b, m, l);
            x += gi(n, b) * (gl(b, m, l) + gl(m, b, l));
          }
          for (int s = 0; s < 4; ++s) t += gam(s, s, l);
          a3(n, m, l) = v;
          a3b(n, m, l) = w;
          a3g(n, m, l) = delta(n, m) * t - x;
        }
    Tensor<1> a1, a1g, a_up;
    for (int l = 0; l < 4; ++l) {
      for (int m = 0; m < 4; ++m) {
        a1(l) += a3(m, m, l);
        a1g(l) += 2.0 * gam(m, m, l);
      }
    }
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) a_up(a) += hu(a, b) * a1(b);  // raised by h
    // A^{ns}_l = d_l h^{ns};  A_{nsl} = -d_l h_{ns}
    Tensor<3> grep;
    for (int m = 0; m < 4; ++m)
      for (int n = 0; n < 4; ++n)
        for (int s = 0; s < 4; ++s) {
          double v = 0.25 * (delta(m, n) * a1(s) + delta(m, s) * a1(n) - hd(n, s) * a_up(m));
          double w = a3(m, n, s) + a3(m, s, n);
          for (int a = 0; a < 4; ++a) w -= hu(m, a) * (-dhd(n, s, a));
          grep(m, n, s) = v - 0.5 * w;
        }
    double aa = 0.0;
    for (int a = 0; a < 4; ++a) aa += a_up(a) * a1(a);
    double cross = 0.0, hterm = 0.0;
    for (int m = 0; m < 4; ++m)
      for (int a = 0; a < 4; ++a)
        for (int s = 0; s < 4; ++s) cross += dhu(m, a, s) * a3(s, a, m);
    for (int a = 0; a < 4; ++a)
      for (int n = 0; n < 4; ++n)
        for (int m = 0; m < 4; ++m)
          for (int s = 0; s < 4; ++s) hterm += hu(a, n) * dhu(m, s, a) * (-dhd(s, m, n));
    Tensor<1> brep;
    for (int m = 0; m < 4; ++m) {
      double v = 0.0;
      for (int a = 0; a < 4; ++a) v += dhu(m, a, a);
      brep(m) = -v - 0.5 * a_up(m);
    }
    r.a3.set(p, a3);
    r.a3_alt.set(p, a3b);
    r.a3_gamma.set(p, a3g);
    r.a1.set(p, a1);
    r.a1_gamma.set(p, a1g);
    r.gamma_rep.set(p, grep);
    r.k_density_rep.value(p, 0) = aa / 8.0 + 0.25 * (2.0 * cross - hterm);
    r.k_density.value(p, 0) = mb.curv.k_scalar.value(p, 0) * mb.sqrt_g.value(p, 0);
    r.b_rep.set(p, brep);
  }
  const auto grad_a = gradient(r.a1);  // [n][m] = d_m A_n
  r.curl_a = make_field<2>(grid, {Down, Down}, [&](std::size_t p) {
    const auto d = grad_a.at(p);
    Matrix4 c;
    for (int m = 0; m < 4; ++m)
      for (int n = 0; n < 4; ++n) c(m, n) = d(n, m) - d(m, n);
    return c;
  });
  const auto log_det = make_scalar(grid, [&](std::size_t p) {
    const double sg = mb.sqrt_g.value(p, 0);
    return std::log(sg * sg);
  });
  r.log_det_gradient = gradient(log_det);
  const auto grad_ld = gradient(r.log_det_gradient);
  r.curl_log_det = make_field<2>(grid, {Down, Down}, [&](std::size_t p) {
    const auto d = grad_ld.at(p);
    Matrix4 c;
    for (int m = 0; m < 4; ++m)
      for (int n = 0; n < 4; ++n) c(m, n) = d(n, m) - d(m, n);
    return c;
  });
  return r;
}

}  // namespace gravitensor
