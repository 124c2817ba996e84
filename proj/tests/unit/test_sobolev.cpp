#include <doctest.h>

#include "helpers.hpp"
#include "hgr/error.hpp"
#include "hgr/finite_difference.hpp"
#include "hgr/sobolev.hpp"
#include "hgr/spectral.hpp"

using namespace hgr;
using namespace hgr::test;

TEST_SUITE("partition") {
  TEST_CASE("smoothstep7 endpoints and symmetry") {
    CHECK(smoothstep7(-1.0) == 0.0);
    CHECK(smoothstep7(0.0) == 0.0);
    CHECK(smoothstep7(1.0) == 1.0);
    CHECK(smoothstep7(2.0) == 1.0);
    CHECK(smoothstep7(0.5) == doctest::Approx(0.5));
    for (double t = 0.05; t < 1.0; t += 0.1) {
      CHECK(smoothstep7(t) + smoothstep7(1.0 - t) == doctest::Approx(1.0));
      CHECK(smoothstep7(t + 0.01) > smoothstep7(t));
    }
  }

  TEST_CASE("profile plateaus and supports") {
    CHECK(psi_radial(0, 0.0) == 1.0);
    CHECK(psi_radial(0, 2.0) == 1.0);
    CHECK(psi_radial(1, 2.0) == 1.0);
    CHECK(psi_radial(0, 8.0) == 0.0);
    CHECK(psi_radial(3, 0.4) == 0.0);
    CHECK(psi_radial(3, 8.0) == 1.0);
    CHECK(psi_radial(3, 1.0) == 1.0);
    CHECK(psi_radial(3, 32.0) == 1.0);
    CHECK(psi_radial(3, 64.0) == 0.0);
    CHECK(chi_profile(1.0 / 16) == 0.0);
    CHECK(chi_profile(0.125) == 1.0);
  }

  TEST_CASE("analytic radial derivatives match difference quotients") {
    const double h = 1e-5;
    for (int j : {0, 1, 3}) {
      for (double r : {0.07, 0.1, 0.3, 5.0, 6.5, 20.0, 50.0}) {
        const double fd1 = (psi_radial(j, r + h) - psi_radial(j, r - h)) / (2 * h);
        const double fd2 =
            (psi_radial(j, r + h) - 2 * psi_radial(j, r) + psi_radial(j, r - h)) / (h * h);
        CHECK(psi_radial_d1(j, r) == doctest::Approx(fd1).epsilon(1e-6).scale(1.0));
        CHECK(psi_radial_d2(j, r) == doctest::Approx(fd2).epsilon(1e-3).scale(1.0));
      }
    }
  }

  TEST_CASE("built partition covers the box and sums to one") {
    const Grid3 g(32, 6.0);
    const int jm = default_j_max(g);
    const DyadicPartition p = build_partition(g, jm);
    for (std::size_t idx = 0; idx < g.size(); idx += 7) {
      double sum = 0.0, caps = 0.0;
      for (int j = 0; j <= jm; ++j) {
        sum += p.psi[j][idx];
        caps += p.psi_caps[j][idx];
      }
      CHECK(sum >= 1.0);
      CHECK(caps == doctest::Approx(1.0).epsilon(1e-14));
    }
    CHECK(p.active(0));
  }

  TEST_CASE("too small j_max is rejected") {
    CHECK_THROWS_AS(build_partition(Grid3(16, 64.0), 1), PreconditionError);
  }

  TEST_CASE("partition checks; the j-3..j+4 overlap window is too narrow") {
    const Grid3 g(64, 16.0);
    const PartitionCheck c = check_partition(build_partition(g, 8));
    CHECK(c.plateau);
    CHECK(c.support);
    CHECK(c.sums_to_one);
    CHECK(c.derivative_bound);
    CHECK(c.overlap_support);
    // the plateau 2^{j-3} <= |x| <= 2^{j+2} spans five octaves, so psi_0 meets psi_4
    CHECK_FALSE(c.overlap_stated);
    CHECK_FALSE(c.stated_window_violations.empty());
  }
}

TEST_SUITE("norms") {
  struct Fixture {
    Grid3 g{32, 6.0};
    DyadicPartition p = build_partition(g, default_j_max(g));
  };

  TEST_CASE_FIXTURE(Fixture, "s = 0 terms are weighted L2 norms of the cut-off pieces") {
    const ScalarField u = bump(g, 1.5, 4, 0.3, 0.0, -0.2);
    for (double gamma : {1.0, 2.0}) {
      const NormParams np{0.0, -0.7, gamma, 0, 0.0};
      const auto terms = hsd_terms(u, p, np);
      double sum = 0.0;
      for (int j = 0; j <= p.j_max; ++j) {
        ScalarField cut = p.psi[j];
        for (auto& v : cut.values()) v = std::pow(v, gamma);
        const ScalarField piece = multiply(cut, u);
        const double oracle = std::exp2(2 * np.delta * j) * integrate_product(piece, piece);
        CHECK(terms[j] == doctest::Approx(oracle).epsilon(1e-11).scale(1e-30));
        sum += terms[j];
      }
      CHECK(norm_hsd(u, p, np) == doctest::Approx(std::sqrt(sum)).epsilon(1e-12));
    }
  }

  TEST_CASE_FIXTURE(Fixture, "weighted norm is a norm") {
    const ScalarField u = bump(g, 1.5);
    const ScalarField v = bump(g, 1.0, 6, 0.5, 0.0, 0.0);
    const NormParams np{1.6, -1.0, 1.0, 0, 0.0};
    CHECK(norm_hsd(ScalarField(g), p, np) == 0.0);
    CHECK(norm_hsd(2.0 * u, p, np) == doctest::Approx(2.0 * norm_hsd(u, p, np)));
    CHECK(norm_hsd(u + v, p, np) <= norm_hsd(u, p, np) + norm_hsd(v, p, np));
    const double uv = inner_hsd(u, v, p, np);
    CHECK(std::abs(uv) <= norm_hsd(u, p, np) * norm_hsd(v, p, np));
    CHECK(inner_hsd(u, v, p, np) == doctest::Approx(inner_hsd(v, u, p, np)));
  }

  TEST_CASE_FIXTURE(Fixture, "integer and Holder norms in trivial cases") {
    const ScalarField u = bump(g, 2.0, 4);
    CHECK(norm_weighted_integer(u, 0, 0.0) == doctest::Approx(l2_norm(u)).epsilon(1e-12));
    CHECK(norm_weighted_integer(u, 0, 0.5) == doctest::Approx(norm_l2_weighted(u, 0.5)).epsilon(1e-12));
    CHECK(norm_cmb(u, 0, 0.0) == doctest::Approx(u.max_abs()));
    CHECK(norm_weighted_integer(u, 1, 0.0) > norm_weighted_integer(u, 0, 0.0));
    const ScalarField w = ScalarField::from_function(g, [](double x, double y, double z) {
      return std::pow(1.0 + std::sqrt(x * x + y * y + z * z), 0.5);
    });
    CHECK(norm_l2_weighted(u, 0.5) == doctest::Approx(l2_norm(multiply(w, u))).epsilon(1e-12));
  }
}

TEST_SUITE("product") {
  TEST_CASE("a33 constants") {
    const Grid3 g(8, 2.0);
    CHECK(a33_c0(A33Field::identity(g)) == doctest::Approx(1.0));
    CHECK(a33_c0(A33Field::scaled_identity(g, 2.0)) == doctest::Approx(2.0));
    CHECK(a33_c0(A33Field::scaled_identity(g, 0.5)) == doctest::Approx(2.0));
    A33Field bad = A33Field::identity(g);
    bad.g[0][3] = -1.0;
    CHECK_THROWS_AS(a33_c0(bad), PreconditionError);
  }

  TEST_CASE("Y inner product with identity a33 reproduces the Y norm") {
    const Grid3 g(16, 4.0);
    ProductState V = ProductState::zeros(g, 2);
    V.v1[0] = bump(g, 1.5);
    V.v2[1] = bump(g, 1.0, 4, 0.5, 0.0, 0.0);
    V.v3[3] = bump(g, 1.2, 3);
    const double y = norm_Y(V, -1.0);
    CHECK(inner_Y_a33(V, V, A33Field::identity(g), -1.0) == doctest::Approx(y * y).epsilon(1e-12));
    // scaling a33 by 2 doubles the v3 contribution only
    ProductState W = ProductState::zeros(g, 2);
    W.v3 = V.v3;
    const double v3 = inner_Y_a33(W, W, A33Field::identity(g), -1.0);
    CHECK(inner_Y_a33(V, V, A33Field::scaled_identity(g, 2.0), -1.0) ==
          doctest::Approx(y * y + v3).epsilon(1e-12));
  }

  TEST_CASE("X inner product with identity a33 reproduces the X norm") {
    const Grid3 g(32, 6.0);
    const DyadicPartition p = build_partition(g, default_j_max(g));
    ProductState V = ProductState::zeros(g, 1);
    V.v1[0] = bump(g, 1.5);
    V.v2[0] = bump(g, 1.0, 4);
    V.v3[2] = bump(g, 1.2, 5, 0.0, 0.3, 0.0);
    const double x = norm_X(V, p, 1.6, -1.0);
    CHECK(inner_X_A0(V, V, A33Field::identity(g), p, 1.6, -1.0) == doctest::Approx(x * x).epsilon(1e-11));
  }
}
