#include <doctest.h>

#include "helpers.hpp"
#include "hgr/error.hpp"
#include "hgr/finite_difference.hpp"

using namespace hgr;
using namespace hgr::test;

TEST_SUITE("grid") {
  TEST_CASE("origin is a grid point and coordinates are uniform") {
    const Grid3 g(16, 4.0);
    CHECK(g.spacing() == doctest::Approx(0.5));
    CHECK(g.coord(0) == doctest::Approx(-4.0));
    CHECK(g.coord(8) == doctest::Approx(0.0));
    CHECK(g.radius(g.index(8, 8, 8)) == doctest::Approx(0.0));
    CHECK(g.cell_volume() == doctest::Approx(0.125));
  }

  TEST_CASE("index and ijk are inverse") {
    const Grid3 g(8, 1.0);
    for (std::size_t idx = 0; idx < g.size(); idx += 13) {
      const auto ijk = g.ijk(idx);
      CHECK(g.index(ijk[0], ijk[1], ijk[2]) == idx);
    }
  }

  TEST_CASE("boundary distance counts cells to the seam") {
    const Grid3 g(16, 4.0);
    CHECK(g.boundary_distance(g.index(0, 8, 8)) == 0);
    CHECK(g.boundary_distance(g.index(15, 8, 8)) == 0);
    CHECK(g.boundary_distance(g.index(8, 8, 8)) == 7);
    CHECK(g.boundary_distance(g.index(3, 8, 13)) == 2);
  }

  TEST_CASE("field arithmetic") {
    const Grid3 g(8, 1.0);
    ScalarField a(g, 2.0), b(g, 3.0);
    CHECK((a + b).max_abs() == 5.0);
    CHECK((a - b).max_abs() == 1.0);
    CHECK((2.0 * a).max_abs() == 4.0);
    CHECK(multiply(a, b).max_abs() == 6.0);
    a.axpy(-2.0, b);
    CHECK(a[5] == -4.0);
    CHECK(ScalarField(g).is_zero());
    // volume of the box (2L)^3 = 8
    CHECK(integrate_product(ScalarField(g, 1.0), ScalarField(g, 1.0)) == doctest::Approx(8.0));
  }

  TEST_CASE("support margin and its enforcement") {
    const Grid3 g(32, 4.0);
    CHECK(support_margin(ScalarField(g)) == 32);
    const ScalarField centred = bump(g, 1.0);
    CHECK(support_margin(centred) >= 8);
    CHECK_NOTHROW(require_support_margin(centred, {}, "centred"));
    const ScalarField edge = bump(g, 1.0, 6, 3.5, 0.0, 0.0);
    CHECK(support_margin(edge) < 8);
    CHECK_THROWS_AS(require_support_margin(edge, {}, "edge"), PreconditionError);
    SupportPolicy off;
    off.enforce = false;
    CHECK_NOTHROW(require_support_margin(edge, off, "edge"));
  }

  TEST_CASE("grid mismatch is rejected") {
    CHECK_THROWS_AS(require_same_grid(Grid3(8, 1.0), Grid3(8, 2.0), "x"), PreconditionError);
  }
}

TEST_SUITE("fd") {
  // periodic trigonometric data: centered differences have no seam error
  ScalarField wave(const Grid3& g) {
    const double k = kPi / g.half_width;
    return ScalarField::from_function(g, [&](double x, double y, double z) {
      return std::sin(k * x) * std::cos(2 * k * y) + std::sin(k * z);
    });
  }

  double d1_error(int n, int order) {
    const Grid3 g(n, 2.0);
    const double k = kPi / g.half_width;
    const ScalarField exact = ScalarField::from_function(
        g, [&](double x, double y, double) { return k * std::cos(k * x) * std::cos(2 * k * y); });
    return max_abs_diff(derivative(wave(g), 0, order), exact);
  }

  TEST_CASE("first derivative converges at the stated order") {
    const double r4 = d1_error(16, 4) / d1_error(32, 4);
    const double r2 = d1_error(16, 2) / d1_error(32, 2);
    CHECK(r4 == doctest::Approx(16.0).epsilon(0.1));
    CHECK(r2 == doctest::Approx(4.0).epsilon(0.1));
  }

  TEST_CASE("constants are annihilated exactly") {
    const Grid3 g(16, 3.0);
    const ScalarField c(g, -1.0);
    for (int a = 0; a < 3; ++a) {
      CHECK(derivative(c, a).is_zero());
      for (int b = 0; b < 3; ++b) CHECK(second_derivative(c, a, b).is_zero());
    }
    CHECK(laplacian(c).is_zero());
  }

  TEST_CASE("mixed and pure second derivatives of a product wave") {
    const Grid3 g(32, 2.0);
    const double k = kPi / g.half_width;
    const ScalarField u = wave(g);
    const ScalarField dxy = ScalarField::from_function(g, [&](double x, double y, double) {
      return -2 * k * k * std::cos(k * x) * std::sin(2 * k * y);
    });
    const ScalarField dzz = ScalarField::from_function(
        g, [&](double, double, double z) { return -k * k * std::sin(k * z); });
    CHECK(max_abs_diff(second_derivative(u, 0, 1), dxy) < 1e-2);
    CHECK(max_abs_diff(second_derivative(u, 1, 0), dxy) < 1e-2);
    CHECK(max_abs_diff(second_derivative(u, 2, 2), dzz) < 2e-4);
  }

  TEST_CASE("laplacian of an eigenfunction") {
    const Grid3 g(32, 2.0);
    const double k = kPi / g.half_width;
    const ScalarField u = ScalarField::from_function(
        g, [&](double x, double y, double z) { return std::sin(k * x) * std::sin(k * y) * std::sin(k * z); });
    ScalarField expect = u;
    expect *= -3 * k * k;
    CHECK(max_abs_diff(laplacian(u, 4), expect) < 1e-3);
    CHECK(max_abs_diff(laplacian(u, 2), expect) < 5e-2);
  }

  TEST_CASE("neighbors wrap periodically") {
    const Grid3 g(8, 1.0);
    const Neighbors nb(g, g.index(0, 7, 3));
    CHECK(nb.at(0, -1) == g.index(7, 7, 3));
    CHECK(nb.at(1, 1) == g.index(0, 0, 3));
    CHECK(nb.at(2, 3) == g.index(0, 7, 6));
    CHECK(nb.at(0, -2, 1, 2) == g.index(6, 1, 3));
  }
}
