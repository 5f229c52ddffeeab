#include <catch_amalgamated.hpp>

#include <cmath>

#include "gravitensor/index_algebra.hpp"
#include "gravitensor/stencil.hpp"

using namespace gravitensor;

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(build_periodic_box({4, 4, 4, 4}, 4), GridError);
  CHECK_THROWS_AS(build_periodic_box({8, 8, 8, 8}, 3), GridError);
  CHECK_NOTHROW(build_periodic_box({5, 5, 1, 1}, 4));
  CHECK_NOTHROW(build_periodic_box({3, 3, 3, 3}, 2));
}

TEST_CASE("periodic shift wraps") {
  const auto grid = build_periodic_box({6, 5, 1, 1}, 2);
  const std::size_t p = grid.index({5, 4, 0, 0});
  CHECK(grid.coords(grid.shift(p, 0, 1)) == std::array<int, 4>{0, 4, 0, 0});
  CHECK(grid.coords(grid.shift(p, 1, 2)) == std::array<int, 4>{5, 1, 0, 0});
  CHECK(grid.shift(p, 2, 1) == p);
}

TEST_CASE("derivative of a sine converges at the stencil order") {
  for (int order : {2, 4}) {
    double prev = 0.0;
    for (int n : {16, 32, 64}) {
      const auto grid = build_periodic_box({n, 1, 1, 1}, order);
      const auto f = make_scalar(grid, [&](std::size_t p) { return std::sin(grid.coordinate(p, 0)); });
      const auto df = gradient(f);
      double err = 0.0;
      for (std::size_t p = 0; p < grid.points(); ++p)
        err = std::max(err, std::abs(df.value(p, 0) - std::cos(grid.coordinate(p, 0))));
      if (prev > 0.0) CHECK(std::abs(std::log2(prev / err) - order) < 0.2);
      prev = err;
      CHECK(linf(partial(f, 1)) == 0.0);
    }
  }
}

TEST_CASE("second derivatives commute exactly") {
  const auto grid = build_periodic_box({8, 8, 1, 1}, 4);
  const auto f = make_scalar(grid, [&](std::size_t p) {
    const auto x = grid.position(p);
    return std::sin(x[0] + 2 * x[1]) * std::cos(x[1]);
  });
  const auto a = partial(partial(f, 0), 1);
  const auto b = partial(partial(f, 1), 0);
  CHECK(linf_diff(a, b) < 1e-13);
}

TEST_CASE("contraction and raising") {
  const auto grid = build_periodic_box({5, 5, 1, 1}, 2);
  const auto eta = minkowski_field(grid, Variance::Down);
  const auto delta_field = kronecker_field(grid);
  CHECK(contract(delta_field, 0, 1).value(0, 0) == Catch::Approx(4.0));
  CHECK_THROWS_AS(contract(eta.dense(), 0, 1), IndexError);
  const auto v = make_field<1>(grid, {Variance::Up}, [](std::size_t) {
    Tensor<1> t;
    t(0) = 1.0;
    t(1) = 2.0;
    return t;
  });
  const auto low = raise_lower(v, 0, eta, IndexMove::Lower);
  CHECK(low.value(0, 1) == Catch::Approx(-2.0));
  CHECK_THROWS_AS(raise_lower(low, 0, eta, IndexMove::Lower), IndexError);
}
