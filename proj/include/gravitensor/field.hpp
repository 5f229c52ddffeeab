#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gravitensor/error.hpp"
#include "gravitensor/grid.hpp"
#include "gravitensor/tensor.hpp"

namespace gravitensor {

/// Point-major storage of `components` reals per lattice point.
class FieldData {
 public:
  FieldData() = default;
  FieldData(Grid grid, std::size_t components)
      : grid_(std::move(grid)), ncomp_(components), values_(grid_.points() * components, 0.0) {}

  const Grid& grid() const { return grid_; }
  std::size_t components() const { return ncomp_; }
  std::size_t points() const { return grid_.points(); }

  double value(std::size_t p, std::size_t c) const { return values_[p * ncomp_ + c]; }
  double& value(std::size_t p, std::size_t c) { return values_[p * ncomp_ + c]; }

  std::span<const double> point(std::size_t p) const { return {values_.data() + p * ncomp_, ncomp_}; }
  std::span<double> point(std::size_t p) { return {values_.data() + p * ncomp_, ncomp_}; }

  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  bool all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); });
  }

 protected:
  Grid grid_;
  std::size_t ncomp_ = 0;
  std::vector<double> values_;
};

template <int Rank>
using Slots = std::array<Variance, Rank>;

/// Dense tensor field with declared index variance per slot.
template <int Rank>
class TensorField : public FieldData {
 public:
  static constexpr int kRank = Rank;
  static constexpr std::size_t kComponents = pow4(Rank);

  TensorField() = default;
  TensorField(Grid grid, Slots<Rank> slots) : FieldData(std::move(grid), kComponents), slots_(slots) {}

  const Slots<Rank>& slots() const { return slots_; }
  void set_slots(const Slots<Rank>& s) { slots_ = s; }

  Tensor<Rank> at(std::size_t p) const {
    Tensor<Rank> t;
    std::copy_n(values_.data() + p * kComponents, kComponents, t.c.begin());
    return t;
  }

  void set(std::size_t p, const Tensor<Rank>& t) {
    std::copy_n(t.c.begin(), kComponents, values_.data() + p * kComponents);
  }

  /// Empty field with the same grid and slots.
  TensorField like() const { return TensorField(grid_, slots_); }

 private:
  Slots<Rank> slots_{};
};

using ScalarField = TensorField<0>;

/// Symmetric rank-2 field stored as ten independent components per point;
/// symmetry holds by construction.
class SymmetricField : public FieldData {
 public:
  static constexpr std::size_t kComponents = 10;

  SymmetricField() = default;
  SymmetricField(Grid grid, Variance v) : FieldData(std::move(grid), kComponents), variance_(v) {}

  Variance variance() const { return variance_; }
  Slots<2> slots() const { return {variance_, variance_}; }

  Matrix4 at(std::size_t p) const {
    Matrix4 m;
    const double* v = values_.data() + p * kComponents;
    for (int i = 0; i < 10; ++i) {
      const auto [a, b] = kSymmetricPairs[i];
      m(a, b) = v[i];
      m(b, a) = v[i];
    }
    return m;
  }

  /// Stores the symmetric part of m.
  void set(std::size_t p, const Matrix4& m) {
    double* v = values_.data() + p * kComponents;
    for (int i = 0; i < 10; ++i) {
      const auto [a, b] = kSymmetricPairs[i];
      v[i] = a == b ? m(a, a) : 0.5 * (m(a, b) + m(b, a));
    }
  }

  double get(std::size_t p, int a, int b) const { return value(p, symmetric_index(a, b)); }

  SymmetricField like() const { return SymmetricField(grid_, variance_); }

  TensorField<2> dense() const {
    TensorField<2> out(grid_, slots());
    for (std::size_t p = 0; p < points(); ++p) out.set(p, at(p));
    return out;
  }

  /// Packs a dense rank-2 field; rejects fields that are not symmetric to `tol`.
  static SymmetricField from_dense(const TensorField<2>& f, double tol = 0.0) {
    if (f.slots()[0] != f.slots()[1]) throw IndexError("symmetric field needs equal slot variances");
    SymmetricField out(f.grid(), f.slots()[0]);
    for (std::size_t p = 0; p < f.points(); ++p) {
      const auto m = f.at(p);
      for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b)
          if (std::abs(m(a, b) - m(b, a)) > tol * std::max(1.0, std::abs(m(a, b))))
            throw IndexError("field is not symmetric");
      out.set(p, m);
    }
    return out;
  }

 private:
  Variance variance_ = Variance::Down;
};

/// Untyped multi-component field: the flat field vector phi^A of the
/// variational engine.
class ComponentField : public FieldData {
 public:
  ComponentField() = default;
  ComponentField(Grid grid, std::size_t components) : FieldData(std::move(grid), components) {}
  ComponentField like() const { return ComponentField(grid_, ncomp_); }
};

// ---------------------------------------------------------------------------
// Builders and norms

template <int Rank, class F>
TensorField<Rank> make_field(const Grid& grid, const Slots<Rank>& slots, F&& f) {
  TensorField<Rank> out(grid, slots);
  for (std::size_t p = 0; p < grid.points(); ++p) out.set(p, f(p));
  return out;
}

template <class F>
ScalarField make_scalar(const Grid& grid, F&& f) {
  ScalarField out(grid, {});
  for (std::size_t p = 0; p < grid.points(); ++p) out.value(p, 0) = f(p);
  return out;
}

template <class F>
SymmetricField make_symmetric(const Grid& grid, Variance v, F&& f) {
  SymmetricField out(grid, v);
  for (std::size_t p = 0; p < grid.points(); ++p) out.set(p, f(p));
  return out;
}

inline void require_same_grid(const FieldData& a, const FieldData& b, const char* what) {
  if (!(a.grid() == b.grid())) throw GridError(std::string("mismatched grids in ") + what);
}

/// Max-norm over all points and components.
inline double linf(const FieldData& f) {
  double m = 0.0;
  for (double x : f.values()) m = std::max(m, std::abs(x));
  return m;
}

/// Root-mean-square over all points and components.
inline double rms(const FieldData& f) {
  if (f.values().empty()) return 0.0;
  double s = 0.0;
  for (double x : f.values()) s += x * x;
  return std::sqrt(s / static_cast<double>(f.values().size()));
}

/// Max-norm of a - b (same layout).
inline double linf_diff(const FieldData& a, const FieldData& b) {
  require_same_grid(a, b, "linf_diff");
  if (a.components() != b.components()) throw IndexError("linf_diff: component count mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

/// Sum of a scalar field over the lattice in point order.
inline double grid_sum(const ScalarField& f) {
  double s = 0.0;
  for (double x : f.values()) s += x;
  return s;
}

template <class Field>
Field add(const Field& a, const Field& b, double sb = 1.0) {
  require_same_grid(a, b, "add");
  Field out = a;
  for (std::size_t i = 0; i < out.values().size(); ++i) out.values()[i] += sb * b.values()[i];
  return out;
}

template <class Field>
Field scale(const Field& a, double s) {
  Field out = a;
  for (auto& x : out.values()) x *= s;
  return out;
}

}  // namespace gravitensor
