#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gravitensor/geometry.hpp"
#include "gravitensor/variational.hpp"

namespace gravitensor {

// ---------------------------------------------------------------------------
// Pointwise kernels

/// sqrt(g) K together with its analytic partials. The metric partial uses the
/// symmetric convention dL = G^{ab} dg_{ab} summed over all a, b.
struct GravityPoint {
  double lagrangian = 0.0;
  Tensor<3> h;  // H_0^{ab,mu}
  Matrix4 d_g;  // dL/dg_{ab}
};

inline Tensor<3> gravity_h0(const PointGeometry& pg) {
  Tensor<1> tr;  // Gamma^{s b}_s
  for (int b = 0; b < 4; ++b)
    for (int s = 0; s < 4; ++s) tr(b) += pg.gamma_up2(s, b, s);
  Tensor<3> h;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int m = 0; m < 4; ++m)
        h(a, b, m) = -0.5 * pg.gi(a, b) * pg.b(m) +
                     pg.sqrt_g * (pg.gamma_up3(m, a, b) - 0.5 * (pg.gi(m, a) * tr(b) + pg.gi(m, b) * tr(a)));
  return h;
}

inline Matrix4 gravity_metric_partial(const PointGeometry& pg, double lagrangian) {
  Tensor<1> v, u;  // V_s = g^{mn} Gamma_{smn}, U_a = Gamma^b_{ab}
  for (int s = 0; s < 4; ++s)
    for (int m = 0; m < 4; ++m)
      for (int n = 0; n < 4; ++n) v(s) += pg.gi(m, n) * pg.gamma_lower(s, m, n);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) u(a) += pg.gamma(b, a, b);
  Tensor<1> vu;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) vu(a) += pg.gi(a, b) * v(b);
  // dL/dg^{pq} with g^{pq} treated as independent
  Matrix4 y;
  for (int p = 0; p < 4; ++p)
    for (int q = 0; q < 4; ++q) {
      double x = 0.0;  // X_{pq} = Gamma_{q m a} Gamma^{a m}_p
      for (int m = 0; m < 4; ++m)
        for (int a = 0; a < 4; ++a) x += pg.gamma_lower(q, m, a) * pg.gamma_up2(a, m, p);
      double w = 0.0;
      for (int a = 0; a < 4; ++a) w += vu(a) * pg.gamma_lower(q, a, p);
      y(p, q) = pg.sqrt_g * (pg.k_tensor(p, q) + 2.0 * x - v(q) * u(p) - w);
    }
  Matrix4 ys;
  for (int p = 0; p < 4; ++p)
    for (int q = 0; q < 4; ++q) ys(p, q) = 0.5 * (y(p, q) + y(q, p));
  const Matrix4 gyg = matmul(matmul(pg.gi, ys), pg.gi);
  Matrix4 r;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) r(a, b) = 0.5 * lagrangian * pg.gi(a, b) - gyg(a, b);
  return r;
}

inline GravityPoint gravity_point(const PointGeometry& pg) {
  GravityPoint out;
  out.lagrangian = pg.sqrt_g * pg.k_scalar;
  out.h = gravity_h0(pg);
  out.d_g = gravity_metric_partial(pg, out.lagrangian);
  return out;
}

/// L_M = sqrt(g)[g^{ab} g^{mn} D_m phi_a D_n phi_b - m^2 g^{ab} phi_a phi_b] and
/// its analytic partials.
struct MatterPoint {
  double lagrangian = 0.0;
  Matrix4 dphi_cov;  // D[mu][a] = D_mu phi_a
  Matrix4 h_phi;     // H_M^{a,mu}   [a][mu]
  Tensor<3> h_g;     // H_M^{ab,mu}  [a][b][mu]
  Tensor<1> d_phi;   // dL/dphi_a
  Matrix4 d_g;       // dL/dg_{ab}, symmetric convention
};

inline Matrix4 covariant_derivative_point(const PointGeometry& pg, const Tensor<1>& phi, const Matrix4& dphi) {
  Matrix4 d;  // dphi is [a][mu]
  for (int m = 0; m < 4; ++m)
    for (int a = 0; a < 4; ++a) {
      double v = dphi(a, m);
      for (int s = 0; s < 4; ++s) v -= pg.gamma(s, a, m) * phi(s);
      d(m, a) = v;
    }
  return d;
}

inline double matter_lagrangian_point(const PointGeometry& pg, const Tensor<1>& phi, const Matrix4& d, double mass) {
  const Matrix4 duu = matmul(matmul(pg.gi, d), pg.gi);  // D^mu phi^a
  double kin = 0.0, pot = 0.0;
  for (int m = 0; m < 4; ++m)
    for (int a = 0; a < 4; ++a) kin += duu(m, a) * d(m, a);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) pot += pg.gi(a, b) * phi(a) * phi(b);
  return pg.sqrt_g * (kin - mass * mass * pot);
}

inline MatterPoint matter_point(const PointGeometry& pg, const Tensor<1>& phi, const Matrix4& dphi, double mass,
                                bool with_partials = true) {
  MatterPoint out;
  const Matrix4& gi = pg.gi;
  const double sg = pg.sqrt_g;
  const double m2 = mass * mass;
  out.dphi_cov = covariant_derivative_point(pg, phi, dphi);
  const Matrix4& d = out.dphi_cov;
  out.lagrangian = matter_lagrangian_point(pg, phi, d, mass);
  if (!with_partials) return out;

  const Matrix4 duu = matmul(matmul(gi, d), gi);  // [mu][a] = D^mu phi^a
  const Matrix4 dlu = matmul(d, gi);              // [mu][a] = D_mu phi^a
  const Matrix4 dul = matmul(gi, d);              // [mu][a] = D^mu phi_a
  Tensor<1> pu;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) pu(a) += gi(a, b) * phi(b);

  for (int a = 0; a < 4; ++a)
    for (int m = 0; m < 4; ++m) out.h_phi(a, m) = 2.0 * sg * duu(m, a);

  Matrix4 s;
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 4; ++y) s(x, y) = duu(x, y) + duu(y, x);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int m = 0; m < 4; ++m)
        out.h_g(a, b, m) = -0.5 * sg * (pu(a) * s(b, m) + pu(b) * s(a, m) - pu(m) * s(a, b));

  for (int a = 0; a < 4; ++a) {
    double v = 0.0;
    for (int b = 0; b < 4; ++b)
      for (int m = 0; m < 4; ++m) v += pg.gamma(a, b, m) * duu(m, b);
    out.d_phi(a) = -2.0 * sg * v - 2.0 * m2 * sg * pu(a);
  }

  Matrix4 t3;  // phi^a Gamma^b_{x mu} D^mu phi^x
  for (int b = 0; b < 4; ++b) {
    double v = 0.0;
    for (int x = 0; x < 4; ++x)
      for (int m = 0; m < 4; ++m) v += pg.gamma(b, x, m) * duu(m, x);
    for (int a = 0; a < 4; ++a) t3(a, b) = pu(a) * v;
  }
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      double t1 = 0.0, t2 = 0.0;
      for (int m = 0; m < 4; ++m) t1 += dlu(m, a) * duu(m, b);
      for (int x = 0; x < 4; ++x) t2 += dul(a, x) * duu(b, x);
      out.d_g(a, b) = 0.5 * gi(a, b) * out.lagrangian - sg * (t1 + t2 - m2 * pu(a) * pu(b)) +
                      sg * (t3(a, b) + t3(b, a));
    }
  return out;
}

/// Centered numeric derivative of f with respect to each metric-gradient slot
/// g_{ab,mu}, perturbing (a,b) and (b,a) together so the result follows the
/// symmetric convention.
template <class F>
Tensor<3> metric_gradient_partial(F&& f, const Tensor<3>& dg, double rel_step = 1e-6) {
  Tensor<3> out;
  for (int a = 0; a < 4; ++a)
    for (int b = a; b < 4; ++b)
      for (int m = 0; m < 4; ++m) {
        const double h = rel_step * std::max(1.0, std::abs(dg(a, b, m)));
        const double w = a == b ? 1.0 : 0.5;
        Tensor<3> up = dg, dn = dg;
        up(a, b, m) += w * h;
        dn(a, b, m) -= w * h;
        if (a != b) {
          up(b, a, m) += w * h;
          dn(b, a, m) -= w * h;
        }
        const double d = (f(up) - f(dn)) / (2.0 * h);
        out(a, b, m) = d;
        out(b, a, m) = d;
      }
  return out;
}

// ---------------------------------------------------------------------------
// Component layout helpers: a dense metric block of 16 components at `off`

inline Matrix4 metric_from(std::span<const double> phi, std::size_t off) {
  Matrix4 g;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) g(a, b) = 0.5 * (phi[off + a * 4 + b] + phi[off + b * 4 + a]);
  return g;
}

inline Tensor<3> metric_gradient_from(std::span<const double> dphi, std::size_t off) {
  Tensor<3> dg;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int m = 0; m < 4; ++m)
        dg(a, b, m) = 0.5 * (dphi[(off + a * 4 + b) * 4 + m] + dphi[(off + b * 4 + a) * 4 + m]);
  return dg;
}

/// Dense 16-component field g_{ab} from a symmetric field.
inline ComponentField metric_components(const SymmetricField& g) {
  ComponentField out(g.grid(), 16);
  for (std::size_t p = 0; p < g.points(); ++p) {
    const auto m = g.at(p);
    for (int i = 0; i < 16; ++i) out.value(p, i) = m.c[i];
  }
  return out;
}

/// (phi_a, g_{ab}) packed as 4 + 16 components.
inline ComponentField matter_components(const TensorField<1>& phi, const SymmetricField& g) {
  require_same_grid(phi, g, "matter_components");
  ComponentField out(g.grid(), 20);
  for (std::size_t p = 0; p < g.points(); ++p) {
    for (int a = 0; a < 4; ++a) out.value(p, a) = phi.value(p, a);
    const auto m = g.at(p);
    for (int i = 0; i < 16; ++i) out.value(p, 4 + i) = m.c[i];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lagrangian densities

/// L = 1/2 eta^{mn} phi_m phi_n for one scalar.
class FreeScalar final : public LagrangianDensity {
 public:
  std::string name() const override { return "free_scalar"; }
  std::size_t components() const override { return 1; }
  double evaluate(std::span<const double>, std::span<const double> dphi) const override {
    double s = 0.0;
    for (int m = 0; m < 4; ++m) s += kEtaDiag[m] * dphi[m] * dphi[m];
    return 0.5 * s;
  }
  void partials(std::span<const double>, std::span<const double> dphi, std::span<double> d_phi,
                std::span<double> d_dphi) const override {
    d_phi[0] = 0.0;
    for (int m = 0; m < 4; ++m) d_dphi[m] = kEtaDiag[m] * dphi[m];
  }
};

/// L = 1/2 m^2 phi^2.
class MassTerm final : public LagrangianDensity {
 public:
  explicit MassTerm(double mass) : mass_(mass) {}
  std::string name() const override { return "mass_term"; }
  std::size_t components() const override { return 1; }
  double evaluate(std::span<const double> phi, std::span<const double>) const override {
    return 0.5 * mass_ * mass_ * phi[0] * phi[0];
  }
  void partials(std::span<const double> phi, std::span<const double>, std::span<double> d_phi,
                std::span<double> d_dphi) const override {
    d_phi[0] = mass_ * mass_ * phi[0];
    std::fill(d_dphi.begin(), d_dphi.end(), 0.0);
  }

 private:
  double mass_;
};

/// L = c, independent of the field.
class ConstantDensity final : public LagrangianDensity {
 public:
  ConstantDensity(std::size_t components, double value) : n_(components), value_(value) {}
  std::string name() const override { return "constant"; }
  std::size_t components() const override { return n_; }
  double evaluate(std::span<const double>, std::span<const double>) const override { return value_; }
  void partials(std::span<const double>, std::span<const double>, std::span<double> d_phi,
                std::span<double> d_dphi) const override {
    std::fill(d_phi.begin(), d_phi.end(), 0.0);
    std::fill(d_dphi.begin(), d_dphi.end(), 0.0);
  }

 private:
  std::size_t n_;
  double value_;
};

/// L = sqrt(g) K over the dense metric g_{ab} (16 components).
class GravityDensity final : public LagrangianDensity {
 public:
  std::string name() const override { return "sqrt_g_K"; }
  std::size_t components() const override { return 16; }
  double evaluate(std::span<const double> phi, std::span<const double> dphi) const override {
    const auto pg = point_geometry(metric_from(phi, 0), metric_gradient_from(dphi, 0));
    return pg.sqrt_g * pg.k_scalar;
  }
  void partials(std::span<const double> phi, std::span<const double> dphi, std::span<double> d_phi,
                std::span<double> d_dphi) const override {
    const auto pg = point_geometry(metric_from(phi, 0), metric_gradient_from(dphi, 0));
    const auto gp = gravity_point(pg);
    for (int i = 0; i < 16; ++i) d_phi[i] = gp.d_g.c[i];
    for (int i = 0; i < 64; ++i) d_dphi[i] = gp.h.c[i];
  }
};

/// Vector matter L_M over (phi_a, g_{ab}), 20 components; optionally with the
/// gravitational sqrt(g) K added (the total first-order Lagrangian).
class VectorMatterDensity final : public LagrangianDensity {
 public:
  explicit VectorMatterDensity(double mass, bool include_gravity = false)
      : mass_(mass), gravity_(include_gravity) {}
  std::string name() const override { return gravity_ ? "sqrt_g_K+L_M" : "L_M"; }
  std::size_t components() const override { return 20; }
  double mass() const { return mass_; }

  double evaluate(std::span<const double> phi, std::span<const double> dphi) const override {
    const auto pg = point_geometry(metric_from(phi, 4), metric_gradient_from(dphi, 4));
    const auto [v, dv] = vector_part(phi, dphi);
    double l = matter_lagrangian_point(pg, v, covariant_derivative_point(pg, v, dv), mass_);
    if (gravity_) l += pg.sqrt_g * pg.k_scalar;
    return l;
  }

  void partials(std::span<const double> phi, std::span<const double> dphi, std::span<double> d_phi,
                std::span<double> d_dphi) const override {
    const auto pg = point_geometry(metric_from(phi, 4), metric_gradient_from(dphi, 4));
    const auto [v, dv] = vector_part(phi, dphi);
    const auto mp = matter_point(pg, v, dv, mass_);
    Matrix4 dg = mp.d_g;
    Tensor<3> hg = mp.h_g;
    if (gravity_) {
      const auto gp = gravity_point(pg);
      dg += gp.d_g;
      hg += gp.h;
    }
    for (int a = 0; a < 4; ++a) {
      d_phi[a] = mp.d_phi(a);
      for (int m = 0; m < 4; ++m) d_dphi[a * 4 + m] = mp.h_phi(a, m);
    }
    for (int i = 0; i < 16; ++i) d_phi[4 + i] = dg.c[i];
    for (int i = 0; i < 64; ++i) d_dphi[16 + i] = hg.c[i];
  }

 private:
  static std::pair<Tensor<1>, Matrix4> vector_part(std::span<const double> phi, std::span<const double> dphi) {
    Tensor<1> v;
    Matrix4 dv;
    for (int a = 0; a < 4; ++a) {
      v(a) = phi[a];
      for (int m = 0; m < 4; ++m) dv(a, m) = dphi[a * 4 + m];
    }
    return {v, dv};
  }

  double mass_;
  bool gravity_;
};

}  // namespace gravitensor
