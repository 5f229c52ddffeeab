#pragma once

#include <cstddef>

#include "gravitensor/field.hpp"

namespace gravitensor {

/// Central-difference derivative of component c at point p along `axis`.
/// Zero on degenerate (size-1) axes.
inline double stencil_derivative(const FieldData& f, std::size_t p, std::size_t c, int axis) {
  const Grid& g = f.grid();
  if (!g.active(axis)) return 0.0;
  const auto w = g.stencil().half_weights();
  const int r = g.stencil().radius();
  double s = 0.0;
  for (int k = 1; k <= r; ++k) {
    const std::size_t up = g.shift(p, axis, k);
    const std::size_t dn = g.shift(p, axis, -k);
    s += w[k - 1] * (f.value(up, c) - f.value(dn, c));
  }
  return s / g.spacings()[axis];
}

/// Coordinate derivative along one axis, component by component; the result
/// has the same shape as the input.
template <class Field>
Field partial(const Field& f, int axis) {
  if (axis < 0 || axis >= kDim) throw IndexError("partial: axis out of range");
  Field out = f.like();
  if (!f.grid().active(axis)) return out;
  for (std::size_t p = 0; p < f.points(); ++p)
    for (std::size_t c = 0; c < f.components(); ++c) out.value(p, c) = stencil_derivative(f, p, c, axis);
  return out;
}

/// Gradient with the derivative index appended as a lowered last slot.
template <int Rank>
TensorField<Rank + 1> gradient(const TensorField<Rank>& f) {
  Slots<Rank + 1> slots{};
  for (int s = 0; s < Rank; ++s) slots[s] = f.slots()[s];
  slots[Rank] = Variance::Down;
  TensorField<Rank + 1> out(f.grid(), slots);
  for (int mu = 0; mu < kDim; ++mu) {
    if (!f.grid().active(mu)) continue;
    for (std::size_t p = 0; p < f.points(); ++p)
      for (std::size_t c = 0; c < TensorField<Rank>::kComponents; ++c)
        out.value(p, c * 4 + mu) = stencil_derivative(f, p, c, mu);
  }
  return out;
}

/// Gradient of a symmetric field as a dense [a][b][mu] field, exactly
/// symmetric in (a,b).
inline TensorField<3> gradient(const SymmetricField& f) {
  TensorField<3> out(f.grid(), {f.variance(), f.variance(), Variance::Down});
  for (int mu = 0; mu < kDim; ++mu) {
    if (!f.grid().active(mu)) continue;
    for (std::size_t p = 0; p < f.points(); ++p)
      for (int i = 0; i < 10; ++i) {
        const double d = stencil_derivative(f, p, static_cast<std::size_t>(i), mu);
        const auto [a, b] = kSymmetricPairs[i];
        out.value(p, Tensor<3>::flat(a, b, mu)) = d;
        out.value(p, Tensor<3>::flat(b, a, mu)) = d;
      }
  }
  return out;
}

/// Gradient of a multi-component field: component A*4 + mu.
inline ComponentField gradient(const ComponentField& f) {
  ComponentField out(f.grid(), f.components() * 4);
  for (int mu = 0; mu < kDim; ++mu) {
    if (!f.grid().active(mu)) continue;
    for (std::size_t p = 0; p < f.points(); ++p)
      for (std::size_t c = 0; c < f.components(); ++c) out.value(p, c * 4 + mu) = stencil_derivative(f, p, c, mu);
  }
  return out;
}

/// Divergence sum_mu d_mu F(..., mu at `slot`, ...). The contracted slot must
/// be contravariant.
template <int Rank>
TensorField<Rank - 1> divergence(const TensorField<Rank>& f, int slot) {
  static_assert(Rank >= 1);
  if (slot < 0 || slot >= Rank) throw IndexError("divergence: slot out of range");
  if (f.slots()[slot] != Variance::Up) throw IndexError("divergence: slot must be contravariant");
  Slots<Rank - 1> slots{};
  for (int s = 0, t = 0; s < Rank; ++s)
    if (s != slot) slots[t++] = f.slots()[s];
  TensorField<Rank - 1> out(f.grid(), slots);
  for (int mu = 0; mu < kDim; ++mu) {
    if (!f.grid().active(mu)) continue;
    for (std::size_t oc = 0; oc < TensorField<Rank - 1>::kComponents; ++oc) {
      const auto od = Tensor<Rank - 1>::digits(oc);
      std::array<int, Rank> d{};
      for (int s = 0, t = 0; s < Rank; ++s) d[s] = (s == slot) ? mu : od[t++];
      const std::size_t ic = Tensor<Rank>::from_digits(d);
      for (std::size_t p = 0; p < f.points(); ++p) out.value(p, oc) += stencil_derivative(f, p, ic, mu);
    }
  }
  return out;
}

/// Divergence of H^{A,mu} stored as ComponentField with component A*4 + mu.
inline ComponentField divergence(const ComponentField& flux) {
  if (flux.components() % 4 != 0) throw IndexError("divergence: flux components not a multiple of 4");
  const std::size_t n = flux.components() / 4;
  ComponentField out(flux.grid(), n);
  for (int mu = 0; mu < kDim; ++mu) {
    if (!flux.grid().active(mu)) continue;
    for (std::size_t p = 0; p < flux.points(); ++p)
      for (std::size_t a = 0; a < n; ++a) out.value(p, a) += stencil_derivative(flux, p, a * 4 + mu, mu);
  }
  return out;
}

}  // namespace gravitensor
