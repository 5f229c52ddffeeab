#include <catch_amalgamated.hpp>

#include <cmath>

#include "gravitensor/assembly.hpp"
#include "gravitensor/harness/cases.hpp"
#include "gravitensor/harness/tolerances.hpp"

using namespace gravitensor;

TEST_CASE("total system with zero matter reduces to gravity") {
  const auto grid = build_periodic_box({16, 16, 1, 1}, 2);
  const auto mb = build_metric_bundle(weakfield_metric(grid, 1e-2));
  const auto gs = build_grav_sector(mb);
  const auto ms = build_matter_sector(mb, TensorField<1>(grid, {Variance::Down}), 1.0);
  const auto ts = build_total(gs, ms);
  CHECK(linf_diff(ts.h_total, gs.h0) == 0.0);
  CHECK(linf_diff(ts.g_total, gs.g0) == 0.0);
  CHECK(linf_diff(ts.e_total, gs.e0) == 0.0);
}

TEST_CASE("sectors on different grids are rejected") {
  const auto a = build_periodic_box({16, 16, 1, 1}, 2);
  const auto b = build_periodic_box({8, 8, 1, 1}, 2);
  const auto gs = build_grav_sector(build_metric_bundle(weakfield_metric(a, 1e-2)));
  const auto mbb = build_metric_bundle(weakfield_metric(b, 1e-2));
  const auto ms = build_matter_sector(mbb, vector_field(b), 1.0);
  CHECK_THROWS_AS(build_total(gs, ms), GridError);
}

TEST_CASE("additivity and recombination are exact") {
  const auto grid = build_periodic_box({16, 16, 1, 1}, 4);
  const auto mb = build_metric_bundle(weakfield_metric(grid, 0.05));
  const auto gs = build_grav_sector(mb);
  const auto ms = build_matter_sector(mb, vector_field(grid), 1.0);
  const auto ts = build_total(gs, ms);
  CHECK(additivity_defect(ts) <= tolerance_for("total_additivity", grid));
  const auto rc = onshell_recombinations(gs, ms, ts);
  CHECK(rc.size() == 7);
  for (const auto& r : rc) {
    INFO(r.name);
    CHECK(r.defect <= tolerance_for("recombination", grid));
  }
}

TEST_CASE("gauge variation is linear in the generator") {
  const auto grid = build_periodic_box({16, 16, 1, 1}, 2);
  const auto g = weakfield_metric(grid, 1e-2);
  const auto phi = vector_field(grid);
  const auto xi = gauge_generator(grid);
  const auto v1 = gauge_variation(xi, g, phi);
  const auto v2 = gauge_variation(scale(xi, 2.0), g, phi);
  CHECK(linf_diff(v2.delta_g, scale(v1.delta_g, 2.0)) <= 1e-14);
  CHECK(linf_diff(v2.delta_phi, scale(v1.delta_phi, 2.0)) <= 1e-14);
  const auto v0 = gauge_variation(TensorField<1>(grid, {Variance::Up}), g, phi);
  CHECK(linf(v0.delta_g) == 0.0);
  CHECK(linf(v0.delta_phi) == 0.0);
}

TEST_CASE("zero generator leaves the action unchanged") {
  const auto grid = build_periodic_box({16, 16, 1, 1}, 2);
  const auto g = weakfield_metric(grid, 1e-2);
  const auto rep = gauge_experiment(g, vector_field(grid), 1.0, TensorField<1>(grid, {Variance::Up}), {1e-2, 1e-3},
                                    [](double, const MetricBundle&, const TensorField<1>&) {});
  for (const auto& s : rep.steps) {
    CHECK(s.action_change == 0.0);
    CHECK(s.e0_change == 0.0);
  }
}

TEST_CASE("large gauge amplitude reports signature loss") {
  const auto grid = build_periodic_box({16, 16, 1, 1}, 2);
  const auto g = weakfield_metric(grid, 1e-2);
  CHECK_THROWS_AS(gauge_experiment(g, vector_field(grid), 1.0, gauge_generator(grid), {10.0, 5.0},
                                   [](double, const MetricBundle&, const TensorField<1>&) {}),
                  GeometryError);
}
