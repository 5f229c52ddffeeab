#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gravitensor/error.hpp"
#include "gravitensor/field.hpp"
#include "gravitensor/residual.hpp"
#include "gravitensor/stencil.hpp"

namespace gravitensor {

/// First-order Lagrangian density L(phi^A, phi^A_{,mu}) evaluated pointwise.
/// Gradient arguments are laid out as dphi[A*4 + mu].
class LagrangianDensity {
 public:
  virtual ~LagrangianDensity() = default;

  virtual std::string name() const = 0;
  virtual std::size_t components() const = 0;

  virtual double evaluate(std::span<const double> phi, std::span<const double> dphi) const = 0;

  /// Analytic dL/dphi^A and dL/dphi^A_{,mu} (the latter is H^{A,mu}).
  virtual void partials(std::span<const double> phi, std::span<const double> dphi, std::span<double> d_phi,
                        std::span<double> d_dphi) const = 0;
};

/// Centered numeric partials of L at one point, step `rel_step * max(1, |x|)`.
inline void numeric_partials(const LagrangianDensity& lag, std::span<const double> phi, std::span<const double> dphi,
                             std::span<double> d_phi, std::span<double> d_dphi, double rel_step = 1e-6) {
  std::vector<double> x(phi.begin(), phi.end());
  std::vector<double> dx(dphi.begin(), dphi.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double x0 = x[i];
    const double h = rel_step * std::max(1.0, std::abs(x0));
    x[i] = x0 + h;
    const double fp = lag.evaluate(x, dx);
    x[i] = x0 - h;
    const double fm = lag.evaluate(x, dx);
    x[i] = x0;
    d_phi[i] = (fp - fm) / (2.0 * h);
  }
  for (std::size_t i = 0; i < dx.size(); ++i) {
    const double x0 = dx[i];
    const double h = rel_step * std::max(1.0, std::abs(x0));
    dx[i] = x0 + h;
    const double fp = lag.evaluate(x, dx);
    dx[i] = x0 - h;
    const double fm = lag.evaluate(x, dx);
    dx[i] = x0;
    d_dphi[i] = (fp - fm) / (2.0 * h);
  }
}

// ---------------------------------------------------------------------------
// Spin structure

/// Coordinate-variation response delta phi = -S^b_l(phi) d_b delta x^l, as a
/// concatenation of blocks acting on consecutive components.
class SpinStructure {
 public:
  enum class Block { Scalar, Covector, CovariantTensor2 };

  SpinStructure() = default;
  SpinStructure& add(Block b) {
    blocks_.push_back({b, size_});
    size_ += block_size(b);
    return *this;
  }

  static SpinStructure scalar() { return SpinStructure().add(Block::Scalar); }
  static SpinStructure covector() { return SpinStructure().add(Block::Covector); }
  static SpinStructure metric() { return SpinStructure().add(Block::CovariantTensor2); }

  std::size_t components() const { return size_; }

  /// out^A = (S^beta_lambda phi)^A. Linear in phi.
  void apply(std::span<const double> phi, int beta, int lambda, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    for (const auto& [kind, off] : blocks_) {
      switch (kind) {
        case Block::Scalar:
          break;
        case Block::Covector:
          out[off + beta] = phi[off + lambda];
          break;
        case Block::CovariantTensor2:
          // (S^r_l g)_{ab} = delta^r_a g_{lb} + delta^r_b g_{al}
          for (int b = 0; b < 4; ++b) out[off + beta * 4 + b] += phi[off + lambda * 4 + b];
          for (int a = 0; a < 4; ++a) out[off + a * 4 + beta] += phi[off + a * 4 + lambda];
          break;
      }
    }
  }

 private:
  static std::size_t block_size(Block b) {
    switch (b) {
      case Block::Scalar: return 1;
      case Block::Covector: return 4;
      case Block::CovariantTensor2: return 16;
    }
    return 0;
  }

  struct Entry {
    Block kind;
    std::size_t offset;
  };
  std::vector<Entry> blocks_;
  std::size_t size_ = 0;
};

// ---------------------------------------------------------------------------
// Euler derivative and the functional oracle

struct PointwisePartials {
  ScalarField lagrangian;
  ComponentField d_phi;  // dL/dphi^A
  ComponentField h;      // H^{A,mu}, component A*4 + mu
};

inline void require_components(const LagrangianDensity& lag, const ComponentField& field) {
  if (lag.components() != field.components())
    throw IndexError(lag.name() + ": expected " + std::to_string(lag.components()) + " field components, got " +
                     std::to_string(field.components()));
}

inline PointwisePartials pointwise_partials(const LagrangianDensity& lag, const ComponentField& field,
                                            const ComponentField& dfield) {
  require_components(lag, field);
  const Grid& grid = field.grid();
  const std::size_t n = field.components();
  PointwisePartials out{ScalarField(grid, {}), ComponentField(grid, n), ComponentField(grid, n * 4)};
  for (std::size_t p = 0; p < grid.points(); ++p) {
    out.lagrangian.value(p, 0) = lag.evaluate(field.point(p), dfield.point(p));
    lag.partials(field.point(p), dfield.point(p), out.d_phi.point(p), out.h.point(p));
  }
  return out;
}

/// G^A = dL/dphi^A - d_mu H^{A,mu}, the outer derivative by stencil.
inline ComponentField euler_derivative(const LagrangianDensity& lag, const ComponentField& field) {
  const auto parts = pointwise_partials(lag, field, gradient(field));
  return add(parts.d_phi, divergence(parts.h), -1.0);
}

/// Discrete functional derivative [A(phi + d e) - A(phi - d e)] / (2 d cellvol),
/// e the unit bump at (point, component). Only points whose stencil reaches
/// the bump contribute to the difference, so the sum runs over those.
inline double functional_oracle(const LagrangianDensity& lag, const ComponentField& field, std::size_t point,
                                std::size_t component, double rel_step = 1e-5) {
  require_components(lag, field);
  const Grid& grid = field.grid();
  if (point >= grid.points() || component >= field.components()) throw IndexError("functional_oracle: out of range");

  std::vector<std::size_t> support{point};
  for (int axis = 0; axis < kDim; ++axis) {
    if (!grid.active(axis)) continue;
    for (int k = 1; k <= grid.stencil().radius(); ++k)
      for (int s : {-k, k}) support.push_back(grid.shift(point, axis, s));
  }
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());

  ComponentField work = field;
  const std::size_t n = field.components();
  std::vector<double> grad(n * 4);
  const auto local_action = [&]() {
    double s = 0.0;
    for (std::size_t q : support) {
      for (std::size_t a = 0; a < n; ++a)
        for (int mu = 0; mu < kDim; ++mu) grad[a * 4 + mu] = stencil_derivative(work, q, a, mu);
      s += lag.evaluate(work.point(q), grad);
    }
    return s;
  };

  const double x0 = field.value(point, component);
  const double d = rel_step * std::max(1.0, std::abs(x0));
  work.value(point, component) = x0 + d;
  const double ap = local_action();
  work.value(point, component) = x0 - d;
  const double am = local_action();
  const double r = (ap - am) / (2.0 * d);
  if (!std::isfinite(r)) throw NumericError("functional_oracle: non-finite result for " + lag.name());
  return r;
}

// ---------------------------------------------------------------------------
// Energy tensor, auxiliaries and identities

/// Everything the variational identities need, for one Lagrangian and field.
struct VariationalBundle {
  ComponentField phi;
  ComponentField dphi;       // phi^A_{,mu}
  ScalarField lagrangian;
  ComponentField d_phi;      // dL/dphi^A
  ComponentField h;          // H^{A,mu}
  ComponentField g_euler;    // G^A
  TensorField<2> energy;     // E^mu_sigma
  TensorField<2> g_spin;     // G^A (S^mu_sigma phi)^A
  TensorField<3> k_aux;      // K^{mu alpha}_lambda
  TensorField<2> z;          // Z^mu_sigma
  TensorField<3> w;          // W^{lambda mu alpha}
  TensorField<2> t;          // t^{mu alpha}
};

/// E^mu_sigma = H^{A,mu} phi^A_{,sigma} - delta^mu_sigma L.
inline TensorField<2> energy_tensor(const ComponentField& h, const ComponentField& dphi, const ScalarField& lag) {
  const std::size_t n = dphi.components() / 4;
  return make_field<2>(lag.grid(), {Variance::Up, Variance::Down}, [&](std::size_t p) {
    Matrix4 e;
    for (int m = 0; m < 4; ++m)
      for (int s = 0; s < 4; ++s) {
        double v = 0.0;
        for (std::size_t a = 0; a < n; ++a) v += h.value(p, a * 4 + m) * dphi.value(p, a * 4 + s);
        e(m, s) = v - delta(m, s) * lag.value(p, 0);
      }
    return e;
  });
}

/// Raises the last slot of K^{ab}_c with eta.
inline Tensor<3> raise_last_eta(const Tensor<3>& k) {
  Tensor<3> r;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) r(a, b, c) = k(a, b, c) * kEtaDiag[c];
  return r;
}

/// W^{l m a} = 1/2 (K^{mal} + K^{aml}) - 1/2 (K^{lma} + K^{mla}) - 1/2 (K^{alm} + K^{lam}),
/// with K^{abc} = K^{ab}_d eta^{dc}.
inline TensorField<3> w_tensor(const TensorField<3>& k_aux) {
  using enum Variance;
  return make_field<3>(k_aux.grid(), {Up, Up, Up}, [&](std::size_t p) {
    const auto k = raise_last_eta(k_aux.at(p));
    Tensor<3> w;
    for (int l = 0; l < 4; ++l)
      for (int m = 0; m < 4; ++m)
        for (int a = 0; a < 4; ++a)
          w(l, m, a) = 0.5 * (k(m, a, l) + k(a, m, l)) - 0.5 * (k(l, m, a) + k(m, l, a)) -
                       0.5 * (k(a, l, m) + k(l, a, m));
    return w;
  });
}

/// Builds E, K, Z, W and t. `p_aux` is the sector-supplied P^{mu alpha}_lambda;
/// pass nullptr when it vanishes.
inline VariationalBundle build_variational(const LagrangianDensity& lag, const ComponentField& field,
                                           const SpinStructure& spin, const TensorField<3>* p_aux = nullptr) {
  using enum Variance;
  require_components(lag, field);
  if (spin.components() != field.components()) throw IndexError("spin structure does not match the field");
  const Grid& grid = field.grid();
  const std::size_t n = field.components();

  VariationalBundle vb;
  vb.phi = field;
  vb.dphi = gradient(field);
  auto parts = pointwise_partials(lag, field, vb.dphi);
  vb.lagrangian = std::move(parts.lagrangian);
  vb.d_phi = std::move(parts.d_phi);
  vb.h = std::move(parts.h);
  vb.g_euler = add(vb.d_phi, divergence(vb.h), -1.0);
  vb.energy = energy_tensor(vb.h, vb.dphi, vb.lagrangian);

  vb.g_spin = TensorField<2>(grid, {Up, Down});
  vb.k_aux = TensorField<3>(grid, {Up, Up, Down});
  std::vector<double> s(n);
  for (std::size_t p = 0; p < grid.points(); ++p) {
    Matrix4 gs;
    Tensor<3> k;
    for (int b = 0; b < 4; ++b)
      for (int l = 0; l < 4; ++l) {
        spin.apply(field.point(p), b, l, s);
        double v = 0.0;
        for (std::size_t a = 0; a < n; ++a) v += vb.g_euler.value(p, a) * s[a];
        gs(b, l) = v;
        for (int m = 0; m < 4; ++m) {
          double w = 0.0;
          for (std::size_t a = 0; a < n; ++a) w += vb.h.value(p, a * 4 + m) * s[a];
          k(m, b, l) = w;
        }
      }
    if (p_aux) k += p_aux->at(p);
    vb.g_spin.set(p, gs);
    vb.k_aux.set(p, k);
  }

  const auto div_k = divergence(vb.k_aux, 0);  // d_l K^{l mu}_sigma
  vb.z = add(add(vb.energy, vb.g_spin), div_k);
  vb.w = w_tensor(vb.k_aux);
  vb.t = divergence(vb.w, 0);
  return vb;
}

/// G^A phi^A_{,sigma}.
inline TensorField<1> euler_times_gradient(const VariationalBundle& vb) {
  const std::size_t n = vb.phi.components();
  return make_field<1>(vb.phi.grid(), {Variance::Down}, [&](std::size_t p) {
    Tensor<1> r;
    for (int s = 0; s < 4; ++s)
      for (std::size_t a = 0; a < n; ++a) r(s) += vb.g_euler.value(p, a) * vb.dphi.value(p, a * 4 + s);
    return r;
  });
}

/// Translation identity: d_mu E^mu_sigma + G phi_sigma.
inline Residual<1> verify_identity_I(const VariationalBundle& vb) {
  const auto div_e = divergence(vb.energy, 0);
  const auto gphi = euler_times_gradient(vb);
  return combine<1>({{1.0, &div_e}, {1.0, &gphi}});
}

/// Z^mu_sigma raised with eta in its lower slot.
inline TensorField<2> z_upper(const VariationalBundle& vb) {
  return make_field<2>(vb.z.grid(), {Variance::Up, Variance::Up}, [&](std::size_t p) {
    auto z = vb.z.at(p);
    for (int m = 0; m < 4; ++m)
      for (int a = 0; a < 4; ++a) z(m, a) *= kEtaDiag[a];
    return z;
  });
}

inline TensorField<2> transposed(const TensorField<2>& f) {
  TensorField<2> out(f.grid(), {f.slots()[1], f.slots()[0]});
  for (std::size_t p = 0; p < f.points(); ++p) out.set(p, transpose(f.at(p)));
  return out;
}

/// Lorentz identity: Z^{mu alpha} - Z^{alpha mu}. The scale is the largest
/// term of Z, since Z itself may vanish.
inline Residual<2> verify_identity_II(const VariationalBundle& vb) {
  const auto zu = z_upper(vb);
  const auto zt = transposed(zu);
  auto r = combine<2>({{1.0, &zu}, {-1.0, &zt}});
  r.scale = std::max({linf(vb.energy), linf(vb.g_spin), linf(divergence(vb.k_aux, 0))});
  return r;
}

/// d_mu d_l K^{l mu}_sigma.
inline TensorField<1> double_divergence_k(const VariationalBundle& vb) {
  return divergence(divergence(vb.k_aux, 0), 0);
}

/// d_mu Z^mu_sigma + G phi_sigma - d_mu(G S^mu_sigma) - d_mu d_l K^{l mu}_sigma.
inline Residual<1> verify_identity_III(const VariationalBundle& vb) {
  const auto div_z = divergence(vb.z, 0);
  const auto gphi = euler_times_gradient(vb);
  const auto div_gs = divergence(vb.g_spin, 0);
  const auto ddk = double_divergence_k(vb);
  return combine<1>({{1.0, &div_z}, {1.0, &gphi}, {-1.0, &div_gs}, {-1.0, &ddk}});
}

/// Symmetry defect t^{mu alpha} - t^{alpha mu}.
inline Residual<2> t_symmetry(const VariationalBundle& vb) {
  const auto tt = transposed(vb.t);
  return combine<2>({{1.0, &vb.t}, {-1.0, &tt}});
}

enum class EmCase { ZOnly, ZPlusT };

struct EnergyMomentum {
  TensorField<2> t;   // T^{mu alpha}
  EmCase which = EmCase::ZOnly;
  double ddk_linf = 0.0;
  double threshold = 0.0;
};

/// Case (i) when ||d_mu d_l K^{l mu alpha}|| stays below `threshold`: T = Z;
/// otherwise T = Z + t. Indices raised with eta.
inline EnergyMomentum em_tensor(const VariationalBundle& vb, double threshold) {
  EnergyMomentum em;
  em.ddk_linf = linf(double_divergence_k(vb));
  em.threshold = threshold;
  em.which = em.ddk_linf <= threshold ? EmCase::ZOnly : EmCase::ZPlusT;
  em.t = z_upper(vb);
  if (em.which == EmCase::ZPlusT) em.t = add(em.t, vb.t);
  return em;
}

}  // namespace gravitensor
