#include <catch_amalgamated.hpp>

#include <cmath>

#include "gravitensor/harness/cases.hpp"
#include "gravitensor/harness/tolerances.hpp"
#include "gravitensor/matter_sector.hpp"

using namespace gravitensor;

namespace {

TensorField<1> sin_time_field(const Grid& grid) {
  return make_field<1>(grid, {Variance::Down}, [&](std::size_t p) {
    Tensor<1> v;
    v(1) = std::sin(grid.coordinate(p, 0));
    return v;
  });
}

}  // namespace

TEST_CASE("covariant derivative reduces to the stencil derivative on flat space") {
  const auto grid = build_periodic_box({16, 16, 1, 1}, 2);
  const auto mb = build_metric_bundle(minkowski_field(grid, Variance::Down));
  const auto phi = vector_field(grid);
  const auto d = covariant_derivative(phi, mb);
  const auto plain = gradient(phi);  // [a][mu]
  for (std::size_t p = 0; p < grid.points(); ++p)
    for (int m = 0; m < 4; ++m)
      for (int a = 0; a < 4; ++a) CHECK(d.at(p)(m, a) == plain.at(p)(a, m));
}

TEST_CASE("covariant correction is linear in the metric amplitude") {
  const auto grid = build_periodic_box({16, 16, 1, 1}, 2);
  const auto phi = vector_field(grid);
  const auto plain = gradient(phi);
  const auto correction = [&](double eps) {
    const auto d = covariant_derivative(phi, build_metric_bundle(weakfield_metric(grid, eps)));
    double m = 0.0;
    for (std::size_t p = 0; p < grid.points(); ++p)
      for (int mu = 0; mu < 4; ++mu)
        for (int a = 0; a < 4; ++a) m = std::max(m, std::abs(d.at(p)(mu, a) - plain.at(p)(a, mu)));
    return m;
  };
  CHECK(correction(2e-4) / correction(1e-4) == Catch::Approx(2.0).epsilon(0.01));
}

TEST_CASE("vector Lagrangian on flat space") {
  const auto grid = build_periodic_box({16, 16, 1, 1}, 2);
  const auto mb = build_metric_bundle(minkowski_field(grid, Variance::Down));
  const auto ms0 = build_matter_sector(mb, sin_time_field(grid), 0.0);
  const auto dphi = gradient(sin_time_field(grid));
  for (std::size_t p = 0; p < grid.points(); ++p) {
    const double d01 = dphi.at(p)(1, 0);
    CHECK(ms0.lagrangian.value(p, 0) == Catch::Approx(-d01 * d01).margin(1e-15));
  }
  const auto ms2 = build_matter_sector(mb, scale(sin_time_field(grid), 2.0), 0.0);
  for (std::size_t p = 0; p < grid.points(); ++p)
    CHECK(ms2.lagrangian.value(p, 0) == Catch::Approx(4.0 * ms0.lagrangian.value(p, 0)).margin(1e-15));
}

TEST_CASE("zero matter field gives a zero sector") {
  const auto grid = build_periodic_box({8, 8, 1, 1}, 2);
  const auto mb = build_metric_bundle(weakfield_metric(grid, 1e-2));
  const auto ms = build_matter_sector(mb, TensorField<1>(grid, {Variance::Down}), 1.0);
  CHECK(linf(ms.lagrangian) == 0.0);
  CHECK(linf(ms.h_phi) == 0.0);
  CHECK(linf(ms.h_g) == 0.0);
  CHECK(linf(ms.g_vec) == 0.0);
  CHECK(linf(ms.m_stress) == 0.0);
  CHECK(linf(ms.e1) == 0.0);
}

TEST_CASE("matter partial oracles") {
  const auto grid = build_periodic_box({16, 16, 1, 1}, 2);
  const auto mb = build_metric_bundle(weakfield_metric(grid, 0.05));
  const auto ms = build_matter_sector(mb, vector_field(grid), 1.0);
  for (std::size_t p : {5u, 120u, 201u}) {
    CHECK(h_phi_oracle(ms, p) <= tolerance_for("oracle", grid));
    CHECK(h_g_oracle(ms, p) <= tolerance_for("oracle", grid));
  }
}

TEST_CASE("mass decoupling of the stress tensor") {
  const auto grid = build_periodic_box({16, 16, 1, 1}, 2);
  const auto mb = build_metric_bundle(weakfield_metric(grid, 1e-2));
  const auto phi = vector_field(grid);
  const auto m0 = build_matter_sector(mb, phi, 0.0);
  const auto m1 = build_matter_sector(mb, phi, 1.0);
  // dL/dg_{ab} of -m^2 sqrt(g) g^{cd} phi_c phi_d = -m^2 sqrt(g)(1/2 g^{ab} phi^2 - phi^a phi^b)
  double worst = 0.0;
  for (std::size_t p = 0; p < grid.points(); ++p) {
    const auto gi = mb.g_inv.at(p);
    const double sg = mb.sqrt_g.value(p, 0);
    Tensor<1> up;
    double sq = 0.0;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) up(a) += gi(a, b) * phi.value(p, b);
    for (int a = 0; a < 4; ++a) sq += up(a) * phi.value(p, a);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        const double expect = -sg * (0.5 * gi(a, b) * sq - up(a) * up(b));
        worst = std::max(worst, std::abs(m1.m_stress.at(p)(a, b) - m0.m_stress.at(p)(a, b) - expect));
      }
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("matter gauge identity converges at the stencil order") {
  for (int order : {2, 4}) {
    double r[2];
    for (int i = 0; i < 2; ++i) {
      const int n = 32 << i;
      const auto grid = build_periodic_box({n, n, 1, 1}, order);
      const auto ms = build_matter_sector(build_metric_bundle(weakfield_metric(grid, 1e-2)), vector_field(grid), 1.0);
      r[i] = norms(matter_gauge_identity(ms)).linf;
    }
    INFO("order " << order);
    CHECK(std::abs(std::log2(r[0] / r[1]) - order) <= 0.5);
  }
}

TEST_CASE("only the sqrt-outside stress form converges to the Euler derivative") {
  double outside[2], inside[2];
  for (int i = 0; i < 2; ++i) {
    const int n = 32 << i;
    const auto grid = build_periodic_box({n, n, 1, 1}, 2);
    const auto ms = build_matter_sector(build_metric_bundle(weakfield_metric(grid, 1e-2)), vector_field(grid), 1.0);
    outside[i] = linf_diff(ms.m_stress, closed_stress(ms, StressForm::SqrtOutside)) / linf(ms.m_stress);
    inside[i] = linf_diff(ms.m_stress, closed_stress(ms, StressForm::SqrtInside)) / linf(ms.m_stress);
  }
  CHECK(outside[0] / outside[1] > 3.0);
  CHECK(inside[0] / inside[1] < 1.5);
  CHECK(inside[1] > 1e-3);
}
