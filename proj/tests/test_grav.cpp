#include <catch_amalgamated.hpp>

#include <cmath>

#include "gravitensor/grav_sector.hpp"
#include "gravitensor/harness/cases.hpp"
#include "gravitensor/harness/tolerances.hpp"

using namespace gravitensor;

TEST_CASE("flat metric annihilates the gravitational sector") {
  const auto grid = build_periodic_box({8, 8, 1, 1}, 2);
  const auto gs = build_grav_sector(build_metric_bundle(minkowski_field(grid, Variance::Down)));
  CHECK(linf(gs.h0) == 0.0);
  CHECK(linf(gs.g0) == 0.0);
  CHECK(linf(gs.e0) == 0.0);
  CHECK(linf(gs.k0) == 0.0);
  CHECK(linf(gs.w0) == 0.0);
  CHECK(linf(gs.t) == 0.0);
}

TEST_CASE("gravitational identities on a random smooth metric") {
  CaseConfig cfg;
  cfg.case_name = "random_smooth";
  const auto gc = generate_case(cfg, 32);
  const Grid& grid = gc.g.grid();
  const auto gs = build_grav_sector(build_metric_bundle(gc.g));
  CHECK(norms(grav_translation(gs)).relative() <= tolerance_for("grav_translation", grid));
  CHECK(norms(grav_energy_identity(gs)).relative() <= tolerance_for("grav_energy_identity", grid));
  CHECK(norms(grav_bianchi(gs)).relative() <= tolerance_for("grav_bianchi", grid));
  CHECK(norms(grav_double_divergence(gs)).relative() <= tolerance_for("grav_double_divergence", grid));
  CHECK(norms(grav_symmetrized_k0(gs)).relative() <= tolerance_for("grav_symmetrized_k0", grid));
  CHECK(norms(grav_w_consistency(gs)).relative() <= tolerance_for("grav_w_consistency", grid));
  CHECK(norms(grav_t_divergence(gs)).relative() <= tolerance_for("grav_t_divergence", grid));
}

TEST_CASE("engine Z equals the gravitational energy identity residual") {
  const auto grid = build_periodic_box({16, 16, 1, 1}, 4);
  const auto gs = build_grav_sector(build_metric_bundle(weakfield_metric(grid, 0.05)));
  const auto r = grav_energy_identity(gs);
  CHECK(linf_diff(gs.vb.z, r.field) <= 1e-10 * r.scale);
}

TEST_CASE("two E_0 forms agree") {
  const auto grid = build_periodic_box({16, 16, 1, 1}, 2);
  const auto gs = build_grav_sector(build_metric_bundle(conformal_metric(grid, 0.05)));
  CHECK(linf_diff(gs.e0, gs.e0_h) <= 1e-9 * linf(gs.e0));
}

TEST_CASE("H_0 and boundary partial oracles") {
  const auto grid = build_periodic_box({16, 16, 1, 1}, 2);
  const auto mb = build_metric_bundle(weakfield_metric(grid, 0.05));
  const auto gs = build_grav_sector(mb);
  for (std::size_t p : {0u, 77u, 255u}) {
    CHECK(h0_oracle(gs, p) <= tolerance_for("oracle", grid));
    CHECK(boundary_partial_oracle(mb, p) <= tolerance_for("oracle", grid));
  }
}

TEST_CASE("boundary partial with g^m_l in place of the Kronecker delta disagrees") {
  const auto grid = build_periodic_box({16, 16, 1, 1}, 2);
  const auto mb = build_metric_bundle(weakfield_metric(grid, 0.05));
  const std::size_t p = 77;
  const auto g = mb.g.at(p);
  const auto inv = invert_metric(g);
  const auto h = mb.h_up.at(p);
  const auto db = metric_gradient_partial(
      [&](const Tensor<3>& d) { return point_geometry(g, inv.inverse, inv.sqrt_g, d).b(0); }, mb.dg.at(p), 1e-6);
  double err_delta = 0.0, err_metric = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int l = 0; l < 4; ++l) {
        double num = 0.0;
        for (int r = 0; r < 4; ++r) num += db(a, r, b) * g(r, l);
        const double with_delta = boundary_partial_closed(h, 0, a, b, l);
        const double with_metric = with_delta - 0.5 * delta(0, l) * h(a, b) + 0.5 * g(0, l) * h(a, b);
        err_delta = std::max(err_delta, std::abs(num - with_delta));
        err_metric = std::max(err_metric, std::abs(num - with_metric));
      }
  CHECK(err_delta < 1e-8);
  CHECK(err_metric > 1e-4);
}
