#include <catch_amalgamated.hpp>

#include <cmath>

#include "gravitensor/geometry.hpp"

using namespace gravitensor;

namespace {

SymmetricField wavy_metric(const Grid& grid, double eps) {
  return make_symmetric(grid, Variance::Down, [&](std::size_t p) {
    const auto x = grid.position(p);
    Matrix4 g = minkowski();
    for (int i = 0; i < 10; ++i) {
      const auto [a, b] = kSymmetricPairs[i];
      const double phase = 0.3 * i;
      const double v = eps * std::sin(x[0] + phase) * std::cos(x[1] - 0.5 * phase);
      g(a, b) += v;
      if (a != b) g(b, a) += v;
    }
    return g;
  });
}

}  // namespace

TEST_CASE("flat metric has vanishing connection and curvature") {
  const auto grid = build_periodic_box({8, 8, 1, 1}, 2);
  const auto mb = build_metric_bundle(make_symmetric(grid, Variance::Down, [](std::size_t) { return minkowski(); }));
  CHECK(linf(mb.conn.gamma) == 0.0);
  CHECK(linf(mb.curv.ricci) == 0.0);
  CHECK(mb.sqrt_g.value(0, 0) == Catch::Approx(1.0));
}

TEST_CASE("degenerate metric reports the failing point") {
  const auto grid = build_periodic_box({8, 8, 1, 1}, 2);
  auto g = make_symmetric(grid, Variance::Down, [](std::size_t) { return minkowski(); });
  g.set(5, Matrix4{});
  try {
    metric_inverse_and_volume(g);
    FAIL("expected GeometryError");
  } catch (const GeometryError& e) {
    CHECK(e.point() == 5);
  }
}

TEST_CASE("signature loss is rejected") {
  const auto grid = build_periodic_box({8, 8, 1, 1}, 2);
  auto g = make_symmetric(grid, Variance::Down, [](std::size_t) { return minkowski(); });
  Matrix4 bad = minkowski();
  bad(1, 1) = 1.0;
  g.set(3, bad);
  CHECK_THROWS_AS(metric_inverse_and_volume(g), GeometryError);
}

TEST_CASE("density decomposition and Bianchi residuals converge") {
  for (int order : {2, 4}) {
    double prev_d = 0.0, prev_b = 0.0;
    for (int n : {16, 32, 64}) {
      const auto grid = build_periodic_box({n, n, 1, 1}, order);
      const auto mb = build_metric_bundle(wavy_metric(grid, 0.1));
      const auto rd = norms(verify_density_decomposition(mb));
      const auto rb = norms(verify_contracted_bianchi(mb));
      if (prev_d > 0.0) {
        INFO("order " << order << " n " << n << " density p=" << std::log2(prev_d / rd.linf)
                      << " bianchi p=" << std::log2(prev_b / rb.linf));
        CHECK(std::abs(std::log2(prev_d / rd.linf) - order) < 1.0);
        CHECK(std::abs(std::log2(prev_b / rb.linf) - order) < 1.0);
      }
      prev_d = rd.linf;
      prev_b = rb.linf;
    }
  }
}

TEST_CASE("density-weighted representations agree with connection forms") {
  const auto grid = build_periodic_box({16, 16, 1, 1}, 4);
  const auto mb = build_metric_bundle(wavy_metric(grid, 0.1));
  const auto hr = h_representation(mb);
  CHECK(linf_diff(hr.a3, hr.a3_alt) < 1e-12);
  CHECK(linf_diff(hr.a3, hr.a3_gamma) < 1e-12);
  CHECK(linf_diff(hr.a1, hr.a1_gamma) < 1e-12);
  CHECK(linf_diff(hr.gamma_rep, mb.conn.gamma) < 1e-12);
  CHECK(linf_diff(hr.k_density_rep, hr.k_density) < 1e-12);
  CHECK(linf_diff(hr.b_rep, mb.b) < 1e-12);
  CHECK(linf(hr.curl_log_det) < 1e-12);
}
