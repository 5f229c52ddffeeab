#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "gravitensor/geometry.hpp"
#include "gravitensor/harness/config.hpp"

namespace gravitensor {

struct GeneratedCase {
  SymmetricField g;    // g_{ab}
  TensorField<1> phi;  // phi_a, zero when the case has no matter
  double mass = 0.0;
  bool has_matter = false;
};

/// Uniform double in [0, 1) from the top 53 bits; fixed across platforms.
inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double phase_sum(const std::array<double, 4>& x, const std::array<int, 4>& k) {
  return k[0] * x[0] + k[1] * x[1] + k[2] * x[2] + k[3] * x[3];
}

/// eta + eps * sin(k_i . x + theta_i) per symmetric component i.
inline SymmetricField weakfield_metric(const Grid& grid, double eps) {
  return make_symmetric(grid, Variance::Down, [&](std::size_t p) {
    const auto x = grid.position(p);
    Matrix4 g = minkowski();
    for (int i = 0; i < 10; ++i) {
      const auto [a, b] = kSymmetricPairs[i];
      const double v = eps * std::sin(phase_sum(x, {1, 1 + i % 2, 1, 1}) + 0.3 * i);
      g(a, b) += v;
      if (a != b) g(b, a) += v;
    }
    return g;
  });
}

/// (1 + eps sin(x^0 + 2x^1 + x^2 + x^3))^2 eta; the wave vector is not null.
inline SymmetricField conformal_metric(const Grid& grid, double eps) {
  return make_symmetric(grid, Variance::Down, [&](std::size_t p) {
    const auto x = grid.position(p);
    const double w = 1.0 + eps * std::sin(phase_sum(x, {1, 2, 1, 1}));
    return (w * w) * minkowski();
  });
}

/// eta plus, per component, three seeded modes with wave numbers in {-1,0,1}
/// and amplitudes summing to at most eps.
inline SymmetricField random_smooth_metric(const Grid& grid, double eps, std::uint64_t seed) {
  struct Mode {
    std::array<int, 4> k;
    double amp, phase;
  };
  std::mt19937_64 rng(seed);
  std::array<std::array<Mode, 3>, 10> modes{};
  for (auto& comp : modes)
    for (auto& m : comp) {
      for (int a = 0; a < 4; ++a) m.k[a] = static_cast<int>(std::floor(3.0 * unit_uniform(rng))) - 1;
      m.amp = (2.0 * unit_uniform(rng) - 1.0) / 3.0;
      m.phase = 2.0 * std::numbers::pi * unit_uniform(rng);
    }
  return make_symmetric(grid, Variance::Down, [&](std::size_t p) {
    const auto x = grid.position(p);
    Matrix4 g = minkowski();
    for (int i = 0; i < 10; ++i) {
      double v = 0.0;
      for (const auto& m : modes[i]) v += m.amp * std::sin(phase_sum(x, m.k) + m.phase);
      const auto [a, b] = kSymmetricPairs[i];
      g(a, b) += eps * v;
      if (a != b) g(b, a) += eps * v;
    }
    return g;
  });
}

/// phi_a = a_a sin(k_a . x + theta_a) with O(1) amplitudes.
inline TensorField<1> vector_field(const Grid& grid) {
  static constexpr double amp[4] = {0.8, 0.6, 0.5, 0.4};
  return make_field<1>(grid, {Variance::Down}, [&](std::size_t p) {
    const auto x = grid.position(p);
    Tensor<1> v;
    for (int a = 0; a < 4; ++a) v(a) = amp[a] * std::sin(phase_sum(x, {1, 2 - a % 2, 1, 1}) + 0.7 * a);
    return v;
  });
}

/// Flat metric and phi_a = a_a sin(x^0 + theta_a), m = 1: solves the matter
/// equation in the continuum.
inline TensorField<1> onshell_vector_field(const Grid& grid) {
  static constexpr double amp[4] = {0.8, 0.6, 0.5, 0.4};
  return make_field<1>(grid, {Variance::Down}, [&](std::size_t p) {
    const double t = grid.coordinate(p, 0);
    Tensor<1> v;
    for (int a = 0; a < 4; ++a) v(a) = amp[a] * std::sin(t + 0.7 * a);
    return v;
  });
}

/// Gauge generator xi^l: products of single-mode sines, amplitude 1.
inline TensorField<1> gauge_generator(const Grid& grid) {
  return make_field<1>(grid, {Variance::Up}, [&](std::size_t p) {
    const auto x = grid.position(p);
    Tensor<1> v;
    for (int l = 0; l < 4; ++l)
      v(l) = std::sin(phase_sum(x, {1, 0, 1, 0}) + 0.5 * l + 0.2) * std::sin(phase_sum(x, {0, 1, 0, 1}) + 0.9 * l + 0.4);
    return v;
  });
}

inline Grid case_grid(const CaseConfig& cfg, int n) { return build_periodic_box(cfg.sizes(n), cfg.resolved_order()); }

/// Builds the case fields on an n-point grid and validates the metric.
inline GeneratedCase generate_case(const CaseConfig& cfg, int n) {
  cfg.validate();
  const Grid grid = case_grid(cfg, n);
  const double eps = cfg.resolved_epsilon();
  GeneratedCase gc;
  gc.phi = TensorField<1>(grid, {Variance::Down});
  gc.mass = cfg.mass;
  const auto& name = cfg.case_name;
  if (name == "flat") {
    gc.g = make_symmetric(grid, Variance::Down, [](std::size_t) { return minkowski(); });
  } else if (name == "weakfield") {
    gc.g = weakfield_metric(grid, eps);
  } else if (name == "conformal") {
    gc.g = conformal_metric(grid, eps);
  } else if (name == "random_smooth") {
    gc.g = random_smooth_metric(grid, eps, cfg.seed);
  } else {  // vector_matter, gauge_experiment
    gc.g = weakfield_metric(grid, eps);
    gc.phi = vector_field(grid);
    gc.has_matter = true;
  }
  try {
    metric_inverse_and_volume(gc.g);
  } catch (const GeometryError& e) {
    throw ConfigError("case '" + name + "' rejected: " + e.what());
  }
  return gc;
}

inline GeneratedCase generate_case(const CaseConfig& cfg) { return generate_case(cfg, cfg.resolved_n()); }

}  // namespace gravitensor
