#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "gravitensor/grav_sector.hpp"
#include "gravitensor/harness/cases.hpp"
#include "gravitensor/harness/tolerances.hpp"

using namespace gravitensor;

namespace {

ComponentField scalar_wave(const Grid& grid) {
  ComponentField f(grid, 1);
  for (std::size_t p = 0; p < grid.points(); ++p) {
    const auto x = grid.position(p);
    f.value(p, 0) = std::sin(x[0] + 2.0 * x[1]) + 0.3 * std::cos(x[1]);
  }
  return f;
}

}  // namespace

TEST_CASE("analytic partials match numeric partials") {
  const GravityDensity grav;
  const auto grid = build_periodic_box({16, 16, 1, 1}, 2);
  const auto field = metric_components(weakfield_metric(grid, 0.05));
  const auto dphi = gradient(field);
  for (std::size_t p : {0u, 37u, 200u}) {
    std::vector<double> a_phi(16), a_d(64), n_phi(16), n_d(64);
    grav.partials(field.point(p), dphi.point(p), a_phi, a_d);
    numeric_partials(grav, field.point(p), dphi.point(p), n_phi, n_d);
    double err = 0.0, scale = 0.0;
    for (int i = 0; i < 64; ++i) {
      err = std::max(err, std::abs(a_d[i] - n_d[i]));
      scale = std::max(scale, std::abs(n_d[i]));
    }
    CHECK(err / scale < 1e-6);
  }
}

TEST_CASE("constant Lagrangian has zero Euler derivative") {
  const auto grid = build_periodic_box({8, 8, 1, 1}, 2);
  const auto g = euler_derivative(ConstantDensity(1, 3.5), scalar_wave(grid));
  CHECK(linf(g) == 0.0);
}

TEST_CASE("functional oracle reproduces the discrete Euler derivative") {
  const auto grid = build_periodic_box({12, 12, 1, 1}, 4);
  const auto field = scalar_wave(grid);
  const FreeScalar lag;
  const auto g = euler_derivative(lag, field);
  for (std::size_t p : {3u, 50u, 143u}) {
    const double num = functional_oracle(lag, field, p, 0);
    CHECK(std::abs(num - g.value(p, 0)) <= 1e-6 * std::max(1.0, std::abs(num)));
  }
}

TEST_CASE("mass term enters the Euler derivative pointwise") {
  const auto grid = build_periodic_box({8, 8, 1, 1}, 2);
  const auto field = scalar_wave(grid);
  const auto g = euler_derivative(MassTerm(2.0), field);
  for (std::size_t p = 0; p < grid.points(); ++p) CHECK(g.value(p, 0) == Catch::Approx(4.0 * field.value(p, 0)));
}

TEST_CASE("spin structure of a covariant tensor") {
  const auto s = SpinStructure::metric();
  std::vector<double> g(16), out(16);
  for (int i = 0; i < 16; ++i) g[i] = i + 1.0;
  s.apply(g, 1, 2, out);
  // (S^1_2 g)_{ab} = delta^1_a g_{2b} + delta^1_b g_{a2}
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      const double expect = (a == 1 ? g[2 * 4 + b] : 0.0) + (b == 1 ? g[a * 4 + 2] : 0.0);
      CHECK(out[a * 4 + b] == expect);
    }
}

TEST_CASE("variational identities close for sqrt(g) K") {
  const auto grid = build_periodic_box({32, 32, 1, 1}, 2);
  const auto mb = build_metric_bundle(weakfield_metric(grid, 1e-2));
  const auto vb = build_variational(GravityDensity{}, metric_components(mb.g), SpinStructure::metric());
  CHECK(norms(verify_identity_I(vb)).relative() <= tolerance_for("identity_translation", grid));
  CHECK(norms(verify_identity_II(vb)).relative() <= tolerance_for("identity_lorentz", grid));
  CHECK(norms(verify_identity_III(vb)).relative() <= tolerance_for("identity_divergence", grid));
  CHECK(norms(t_symmetry(vb)).relative() <= tolerance_for("t_symmetry", grid));
}

TEST_CASE("energy-momentum case selector") {
  const auto grid = build_periodic_box({16, 16, 1, 1}, 2);
  const auto mb = build_metric_bundle(weakfield_metric(grid, 1e-2));
  const auto vb = build_variational(GravityDensity{}, metric_components(mb.g), SpinStructure::metric());
  const auto loose = em_tensor(vb, 1e300);
  CHECK(loose.which == EmCase::ZOnly);
  CHECK(linf_diff(loose.t, z_upper(vb)) == 0.0);
  const auto strict = em_tensor(vb, -1.0);
  CHECK(strict.which == EmCase::ZPlusT);
  CHECK(linf_diff(strict.t, add(z_upper(vb), vb.t)) == 0.0);
}

TEST_CASE("W of a constant K has zero divergence") {
  const auto grid = build_periodic_box({8, 8, 1, 1}, 2);
  const auto k = make_field<3>(grid, {Variance::Up, Variance::Up, Variance::Down}, [](std::size_t) {
    Tensor<3> t;
    for (std::size_t i = 0; i < t.c.size(); ++i) t.c[i] = 0.1 * static_cast<double>(i % 7);
    return t;
  });
  CHECK(linf(divergence(w_tensor(k), 0)) == 0.0);
}
