#include <doctest.h>

#include "helpers.hpp"
#include "hgr/constraints.hpp"
#include "hgr/error.hpp"

using namespace hgr;
using namespace hgr::test;

TEST_SUITE("constraints") {
  TEST_CASE("flat data has no constraint residual") {
    const ADMData d = ADMData::flat(Grid3(16, 3.0));
    CHECK(hamiltonian_residual(d).is_zero());
    for (const auto& m : momentum_residual(d)) CHECK(m.is_zero());
  }

  TEST_CASE("pure trace K = k e gives H = 6 k^2 and no momentum residual") {
    const Grid3 g(16, 3.0);
    ADMData d = ADMData::flat(g);
    const double k = 0.3;
    for (int a = 0; a < 3; ++a) d.K[sym3_index(a, a)] = ScalarField(g, k);
    const ScalarField H = hamiltonian_residual(d, 4);
    const std::size_t centre = g.index(8, 8, 8);
    CHECK(H[centre] == doctest::Approx(6 * k * k));
    for (const auto& m : momentum_residual(d, 4)) CHECK(m.max_abs() < 1e-14);
  }

  TEST_CASE("Cauchy data from K = k e") {
    const Grid3 g(16, 3.0);
    ADMData d = ADMData::flat(g);
    const double k = 0.3;
    for (int a = 0; a < 3; ++a) d.K[sym3_index(a, a)] = ScalarField(g, k);
    const CauchyData cd = assemble_cauchy_data(d);
    const std::size_t i = g.index(3, 4, 5);
    for (int a = 1; a < 4; ++a)
      for (int b = a; b < 4; ++b)
        CHECK(cd.gt[sym_index(a, b)][i] == doctest::Approx(a == b ? -2 * k : 0.0).scale(1.0));
    CHECK(cd.gt[0][i] == doctest::Approx(6 * k));
    CHECK(cd.g.g[0][i] == -1.0);
  }

  TEST_CASE("the TT seed is trace-free and scaled to its amplitude") {
    const Grid3 g(32, 4.0);
    const auto K = tt_curvature(g, 0.01, 2.0);
    double peak = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double tr = K[sym3_index(0, 0)][i] + K[sym3_index(1, 1)][i] + K[sym3_index(2, 2)][i];
      CHECK(std::abs(tr) < 1e-17);
      for (const auto& f : K) peak = std::max(peak, std::abs(f[i]));
    }
    CHECK(peak == doctest::Approx(0.01));
  }

  TEST_CASE("assembled Cauchy data satisfies the harmonic gauge") {
    const Grid3 g(32, 4.0);
    SeedSpec spec;
    spec.kind = "gaussian-tt";
    spec.amplitude = 0.05;
    spec.radius = 2.0;
    const LichnerowiczResult sol = lichnerowicz_solve(make_seed(g, spec));
    CauchyData cd = assemble_cauchy_data(sol.data);
    const auto F = gauge_F(cd.g, metric_derivatives(cd.g, cd.gt));
    for (const auto& f : F) CHECK(f.max_abs() < 1e-12);
  }

  TEST_CASE("schwarzschild seed is vacuum away from the floor") {
    auto worst = [](int n) {
      const Grid3 g(n, 4.0);
      const ScalarField R = scalar_curvature(schwarzschild_isotropic(g, 0.5, 0.25), 2);
      double m = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double r = g.radius(i);
        if (r >= 1.0 && r <= 3.0) m = std::max(m, std::abs(R[i]));
      }
      return m;
    };
    const double e1 = worst(32), e2 = worst(64);
    CHECK(e2 < e1 / 3.0);
  }

  TEST_CASE("unknown seed kind is a config error") {
    SeedSpec spec;
    spec.kind = "nope";
    CHECK_THROWS_AS(make_seed(Grid3(8, 1.0), spec), ConfigError);
    CHECK(seed_kinds().size() == 3);
    CHECK(delta_window(-1.0).find("satisfied") != std::string::npos);
  }
}

TEST_SUITE("lichnerowicz") {
  TEST_CASE("vanishing free curvature gives phi = 1") {
    const Grid3 g(16, 3.0);
    const LichnerowiczResult r = lichnerowicz_solve(make_seed(g, SeedSpec{}));
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(r.phi[i] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.data.h[0][5] == doctest::Approx(1.0));
  }

  TEST_CASE("excised point mass approximates 1 + M/(2r)") {
    const Grid3 g(32, 4.0);
    SeedSpec spec;
    spec.kind = "schwarzschild-excision";
    spec.mass = 0.5;
    spec.excision_radius = 1.0;
    const LichnerowiczResult r = lichnerowicz_solve(make_seed(g, spec));
    const auto interior = lichnerowicz_interior(g, spec.excision_radius);
    const double dx = g.spacing();
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (interior[i]) err = std::max(err, std::abs(r.phi[i] - (1.0 + spec.mass / (2 * g.radius(i)))));
    CHECK(err <= 5 * dx * dx * spec.mass / std::pow(spec.excision_radius, 3));
  }

  TEST_CASE("positive mass needs an excision radius") {
    ConformalSeed seed = make_seed(Grid3(8, 2.0), SeedSpec{});
    seed.mass = 1.0;
    CHECK_THROWS_AS(lichnerowicz_solve(seed), PreconditionError);
  }

  TEST_CASE("free curvature with a trace is rejected") {
    const Grid3 g(16, 3.0);
    ConformalSeed seed = make_seed(g, SeedSpec{});
    seed.free.K[0] = bump(g, 1.0);
    CHECK_THROWS_AS(lichnerowicz_solve(seed), PreconditionError);
  }
}
