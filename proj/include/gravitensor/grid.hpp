#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>

#include "gravitensor/error.hpp"

namespace gravitensor {

inline constexpr int kDim = 4;

/// Central first-derivative stencil on a periodic axis.
///
/// The derivative is D f(i) = sum_k w_k (f(i+k) - f(i-k)) / h for k = 1..radius.
/// Second derivatives are obtained by composing two first-derivative stencils,
/// which keeps discrete mixed derivatives exactly symmetric.
struct StencilSpec {
  int order = 2;

  int radius() const { return order / 2; }

  /// One-sided weights w_1..w_radius.
  std::array<double, 2> half_weights() const {
    if (order == 2) return {0.5, 0.0};
    return {2.0 / 3.0, -1.0 / 12.0};
  }

  /// Full antisymmetric weight vector for offsets -radius..radius.
  std::array<double, 5> full_weights() const {
    std::array<double, 5> w{};
    const auto hw = half_weights();
    for (int k = 1; k <= radius(); ++k) {
      w[2 + k] = hw[k - 1];
      w[2 - k] = -hw[k - 1];
    }
    return w;
  }
};

/// Discrete periodic 4D lattice. Axis 0 is the time coordinate x^0.
///
/// Axes of size 1 are degenerate: fields are constant along them and every
/// derivative along them is exactly zero. Every other axis must hold at least
/// stencil_order + 1 points.
class Grid {
 public:
  Grid() = default;

  const std::array<int, 4>& sizes() const { return sizes_; }
  const std::array<double, 4>& spacings() const { return spacings_; }
  int stencil_order() const { return stencil_.order; }
  const StencilSpec& stencil() const { return stencil_; }

  std::size_t points() const { return points_; }
  bool active(int axis) const { return sizes_[axis] > 1; }

  int active_axes() const {
    int n = 0;
    for (int a = 0; a < kDim; ++a) n += active(a) ? 1 : 0;
    return n;
  }

  std::size_t stride(int axis) const { return strides_[axis]; }

  std::size_t index(const std::array<int, 4>& c) const {
    std::size_t p = 0;
    for (int a = 0; a < kDim; ++a) p += static_cast<std::size_t>(c[a]) * strides_[a];
    return p;
  }

  std::array<int, 4> coords(std::size_t p) const {
    std::array<int, 4> c{};
    for (int a = 0; a < kDim; ++a) c[a] = static_cast<int>((p / strides_[a]) % sizes_[a]);
    return c;
  }

  /// Index of the point displaced by `offset` along `axis`, with periodic wrap.
  std::size_t shift(std::size_t p, int axis, int offset) const {
    const int n = sizes_[axis];
    const int c = static_cast<int>((p / strides_[axis]) % n);
    int m = (c + offset) % n;
    if (m < 0) m += n;
    return p + static_cast<std::size_t>(m) * strides_[axis] - static_cast<std::size_t>(c) * strides_[axis];
  }

  /// Coordinate x^axis of point p; the box is [0, size * spacing) per axis.
  double coordinate(std::size_t p, int axis) const {
    return spacings_[axis] * static_cast<double>((p / strides_[axis]) % sizes_[axis]);
  }

  std::array<double, 4> position(std::size_t p) const {
    return {coordinate(p, 0), coordinate(p, 1), coordinate(p, 2), coordinate(p, 3)};
  }

  double cell_volume() const { return spacings_[0] * spacings_[1] * spacings_[2] * spacings_[3]; }

  /// Largest spacing over active axes; the h of truncation estimates.
  double max_active_spacing() const {
    double h = 0.0;
    for (int a = 0; a < kDim; ++a)
      if (active(a)) h = std::max(h, spacings_[a]);
    return h;
  }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.sizes_ == b.sizes_ && a.spacings_ == b.spacings_ && a.stencil_.order == b.stencil_.order;
  }

  friend Grid build_grid(const std::array<int, 4>& sizes, const std::array<double, 4>& spacings,
                         int stencil_order);

 private:
  std::array<int, 4> sizes_{1, 1, 1, 1};
  std::array<double, 4> spacings_{1.0, 1.0, 1.0, 1.0};
  std::array<std::size_t, 4> strides_{1, 1, 1, 1};
  std::size_t points_ = 1;
  StencilSpec stencil_{};
};

/// Validated grid construction.
inline Grid build_grid(const std::array<int, 4>& sizes, const std::array<double, 4>& spacings,
                       int stencil_order) {
  if (stencil_order != 2 && stencil_order != 4)
    throw GridError("stencil order must be 2 or 4, got " + std::to_string(stencil_order));
  for (int a = 0; a < kDim; ++a) {
    if (sizes[a] < 1) throw GridError("axis " + std::to_string(a) + " has non-positive size");
    if (sizes[a] > 1 && sizes[a] < stencil_order + 1)
      throw GridError("axis " + std::to_string(a) + " size " + std::to_string(sizes[a]) +
                      " is below stencil_order + 1 = " + std::to_string(stencil_order + 1));
    if (!(spacings[a] > 0.0) || !std::isfinite(spacings[a]))
      throw GridError("axis " + std::to_string(a) + " spacing must be positive");
  }
  Grid g;
  g.sizes_ = sizes;
  g.spacings_ = spacings;
  g.stencil_.order = stencil_order;
  g.strides_[3] = 1;
  for (int a = 2; a >= 0; --a) g.strides_[a] = g.strides_[a + 1] * static_cast<std::size_t>(sizes[a + 1]);
  g.points_ = g.strides_[0] * static_cast<std::size_t>(sizes[0]);
  return g;
}

/// Grid on the box [0, 2pi)^4: spacing 2pi/n on every axis.
inline Grid build_periodic_box(const std::array<int, 4>& sizes, int stencil_order) {
  std::array<double, 4> h{};
  for (int a = 0; a < kDim; ++a) h[a] = 2.0 * std::numbers::pi / static_cast<double>(sizes[a] < 1 ? 1 : sizes[a]);
  return build_grid(sizes, h, stencil_order);
}

}  // namespace gravitensor
