#include <doctest.h>

#include "helpers.hpp"
#include "hgr/error.hpp"
#include "hgr/spectral.hpp"

using namespace hgr;
using namespace hgr::test;

TEST_SUITE("spectral") {
  // cos(xi.x) with xi on the box lattice pi m / L
  ScalarField plane(const Grid3& g, int m1, int m2, int m3, double* xi2) {
    const double q = kPi / g.half_width;
    *xi2 = q * q * (m1 * m1 + m2 * m2 + m3 * m3);
    return ScalarField::from_function(g, [&](double x, double y, double z) {
      return std::cos(q * (m1 * x + m2 * y + m3 * z));
    });
  }

  TEST_CASE("plane waves are eigenfunctions of the Bessel multiplier") {
    const Grid3 g(16, 3.0);
    double xi2 = 0.0;
    const ScalarField u = plane(g, 2, -1, 3, &xi2);
    for (double s : {-1.0, 0.5, 1.6}) {
      for (double lambda : {1.0, 4.0}) {
        ScalarField expect = u;
        expect *= std::pow(1.0 + lambda * lambda * xi2, s / 2);
        const ScalarField got = apply_bessel_multiplier(u, s, lambda);
        CHECK(max_abs_diff(got, expect) < 1e-11 * expect.max_abs());
        const double e = bessel_energy(u, s, lambda);
        CHECK(e == doctest::Approx(std::pow(1.0 + lambda * lambda * xi2, s) * integrate_product(u, u))
                       .epsilon(1e-11));
      }
    }
  }

  TEST_CASE("multipliers compose additively in s") {
    const Grid3 g(16, 3.0);
    const ScalarField u = bump(g, 1.5, 4, 0.2, -0.1, 0.0);
    const ScalarField ab = apply_bessel_multiplier(apply_bessel_multiplier(u, 0.7), -1.9);
    const ScalarField direct = apply_bessel_multiplier(u, -1.2);
    CHECK(max_abs_diff(ab, direct) < 1e-12 * u.max_abs());
    const ScalarField back = apply_bessel_multiplier(apply_bessel_multiplier(u, 1.6), -1.6);
    CHECK(max_abs_diff(back, u) < 1e-12);
  }

  TEST_CASE("s = 0 energy is the L2 norm") {
    const Grid3 g(32, 4.0);
    const ScalarField u = bump(g, 1.5);
    const ScalarField v = bump(g, 1.2, 3, 0.3, 0.0, 0.0);
    CHECK(bessel_energy(u, 0.0) == doctest::Approx(integrate_product(u, u)).epsilon(1e-12));
    CHECK(bessel_energy(u, v, 0.0, 8.0) == doctest::Approx(integrate_product(u, v)).epsilon(1e-12));
    CHECK(norm_hs(u, 0.0) == doctest::Approx(l2_norm(u)).epsilon(1e-12));
  }

  TEST_CASE("H^s norms increase with s") {
    const Grid3 g(32, 4.0);
    const ScalarField u = bump(g, 1.0);
    CHECK(norm_hs(u, 0.5) < norm_hs(u, 1.0));
    CHECK(norm_hs(u, 1.0) < norm_hs(u, 1.6));
    // Lambda^1 energy equals ||u||^2 + ||grad u||^2 up to the spectral accuracy of the bump
    const double dx2 = bessel_energy(u, 1.0) - bessel_energy(u, 0.0);
    CHECK(dx2 > 0.0);
  }

  TEST_CASE("lambda_s refuses data reaching the seam") {
    const Grid3 g(32, 4.0);
    const ScalarField edge = bump(g, 1.0, 6, 3.5, 0.0, 0.0);
    CHECK_THROWS_AS(lambda_s(edge, 1.0), PreconditionError);
    CHECK_NOTHROW(lambda_s(bump(g, 1.0), 1.0));
  }
}
