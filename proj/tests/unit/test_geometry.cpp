#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "hgr/error.hpp"
#include "hgr/geometry.hpp"

using namespace hgr;
using namespace hgr::test;

namespace {

struct RandomJet {
  Mat4 g;
  Deriv1 dg{};
  Deriv2 ddg{};
};

RandomJet random_jet(std::uint64_t seed, double size) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  RandomJet j;
  j.g = minkowski4();
  for (int a = 0; a < 4; ++a)
    for (int b = a; b < 4; ++b) {
      const double e = size * U(rng);
      j.g[a][b] += e;
      if (a != b) j.g[b][a] += e;
    }
  for (int c = 0; c < 4; ++c)
    for (int a = 0; a < 4; ++a)
      for (int b = a; b < 4; ++b) j.dg[c][a][b] = j.dg[c][b][a] = U(rng);
  for (int c = 0; c < 4; ++c)
    for (int d = c; d < 4; ++d)
      for (int a = 0; a < 4; ++a)
        for (int b = a; b < 4; ++b) {
          const double v = U(rng);
          j.ddg[c][d][a][b] = j.ddg[c][d][b][a] = j.ddg[d][c][a][b] = j.ddg[d][c][b][a] = v;
        }
  return j;
}

}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("symmetric index round trip") {
    for (int c = 0; c < kN; ++c) {
      const auto p = sym_pair(c);
      CHECK(sym_index(p[0], p[1]) == c);
      CHECK(sym_index(p[1], p[0]) == c);
    }
    CHECK(sym_index(0, 0) == 0);
    CHECK(sym_index(3, 3) == 9);
  }

  TEST_CASE("inverse of a perturbed Minkowski metric") {
    const RandomJet j = random_jet(7, 0.2);
    double det = 0.0;
    const Mat4 gi = invert4(j.g, &det);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        double s = 0.0;
        for (int c = 0; c < 4; ++c) s += j.g[a][c] * gi[c][b];
        CHECK(s == doctest::Approx(a == b ? 1.0 : 0.0).scale(1.0).epsilon(1e-13));
      }
    CHECK(det < 0.0);
    CHECK(signature(j.g).lorentzian());
    Mat4 euclid = zero4();
    for (int a = 0; a < 4; ++a) euclid[a][a] = 1.0;
    CHECK_FALSE(signature(euclid).lorentzian());
  }

  TEST_CASE("Christoffel symbols of a conformally flat metric at a point") {
    // g = e^{2 sigma} eta with sigma = 0 and d sigma = v at the point:
    // Gamma^m_bc = delta^m_b v_c + delta^m_c v_b - eta_bc eta^{md} v_d
    const std::array<double, 4> v{0.3, -0.7, 0.2, 1.1};
    const Mat4 eta = minkowski4();
    Deriv1 dg{};
    for (int c = 0; c < 4; ++c)
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) dg[c][a][b] = 2.0 * v[c] * eta[a][b];
    const Christoffel4 gam = christoffel_point(eta, dg);
    std::array<double, 4> vup{};
    for (int m = 0; m < 4; ++m) vup[m] = eta[m][m] * v[m];
    for (int m = 0; m < 4; ++m)
      for (int b = 0; b < 4; ++b)
        for (int c = 0; c < 4; ++c) {
          const double expect = (m == b) * v[c] + (m == c) * v[b] - eta[b][c] * vup[m];
          CHECK(gam[m][b][c] == doctest::Approx(expect).scale(1.0));
        }
    // F^m = eta^{bc} Gamma^m_bc = -2 v^m in four dimensions
    const auto F = gauge_F_point(eta, dg);
    for (int m = 0; m < 4; ++m) CHECK(F[m] == doctest::Approx(-2.0 * vup[m]).scale(1.0));
  }

  TEST_CASE("reduction identity on random jets") {
    for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
      const RandomJet j = random_jet(seed, 0.3);
      const Mat4 gi = invert4(j.g);
      const Mat4 Q = reduced_Q_point(gi, j.dg);
      const Mat4 R = ricci_point(gi, j.dg, j.ddg);
      const Mat4 G = gauge_terms_point(j.g, gi, j.dg, j.ddg);
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          double box = 0.0;
          for (int c = 0; c < 4; ++c)
            for (int d = 0; d < 4; ++d) box += gi[c][d] * j.ddg[c][d][a][b];
          const double res = box - Q[a][b] + 2.0 * R[a][b] - G[a][b];
          CHECK(std::abs(res) < 1e-11);
        }
    }
  }

  TEST_CASE("bilinear Q is symmetric and reproduces the quadratic form") {
    const RandomJet x = random_jet(11, 0.2), y = random_jet(12, 0.2);
    const Mat4 gi = invert4(x.g);
    const Mat4 qxx = reduced_Q_bilinear(gi, x.dg, x.dg);
    const Mat4 q = reduced_Q_point(gi, x.dg);
    const Mat4 qxy = reduced_Q_bilinear(gi, x.dg, y.dg);
    const Mat4 qyx = reduced_Q_bilinear(gi, y.dg, x.dg);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        CHECK(qxx[a][b] == doctest::Approx(q[a][b]).scale(1.0).epsilon(1e-12));
        CHECK(qxy[a][b] == doctest::Approx(qyx[a][b]).scale(1.0).epsilon(1e-12));
        CHECK(qxy[a][b] == doctest::Approx(qxy[b][a]).scale(1.0).epsilon(1e-12));
      }
  }

  TEST_CASE("flat jet has vanishing curvature and gauge source") {
    const Mat4 eta = minkowski4();
    const Deriv1 dg{};
    const Deriv2 ddg{};
    const Mat4 R = ricci_point(eta, dg, ddg);
    for (const auto& row : R)
      for (double v : row) CHECK(v == 0.0);
    for (double f : gauge_F_point(eta, dg)) CHECK(f == 0.0);
  }

  TEST_CASE("metric field inversion and signature failure") {
    const Grid3 g(8, 2.0);
    MetricField m = MetricField::minkowski(g);
    CHECK(m.has_inverse());
    CHECK(m.inverse_at(17)[0][0] == doctest::Approx(-1.0));
    CHECK(m.gtilde[sym_index(1, 1)][3] == doctest::Approx(1.0));
    std::array<ScalarField, kN> comps;
    for (int c = 0; c < kN; ++c) comps[c] = ScalarField(g, 0.0);
    for (int a = 0; a < 4; ++a) comps[sym_index(a, a)] = ScalarField(g, 1.0);
    MetricField e = MetricField::from_components(comps);
    CHECK_THROWS_AS(invert_metric(e), NumericError);
  }

  TEST_CASE("field Ricci of a static weak-field metric matches linearised gravity") {
    // g = -(1+2Phi) dt^2 + (1-2Phi) dx^2 with small Phi: R_00 = Lap Phi to first order
    const Grid3 g(32, 4.0);
    const double eps = 1e-6;
    const ScalarField Phi = bump(g, 2.0, 6);
    std::array<ScalarField, kN> comps, zero;
    for (int c = 0; c < kN; ++c) comps[c] = zero[c] = ScalarField(g, 0.0);
    comps[0] = ScalarField(g, -1.0).axpy(-2 * eps, Phi);
    for (int a = 1; a < 4; ++a) comps[sym_index(a, a)] = ScalarField(g, 1.0).axpy(-2 * eps, Phi);
    MetricField m = MetricField::from_components(comps);
    invert_metric(m);
    const auto dg = metric_derivatives(m, zero);
    const auto ddg = metric_second_derivatives(m, zero, zero);
    const auto R = ricci(m, dg, ddg);
    ScalarField lap = ScalarField::from_function(g, [&](double x, double y, double z) {
      const double r2 = (x * x + y * y + z * z) / 4.0;
      if (r2 >= 1.0) return 0.0;
      // Laplacian of (1 - r^2/4)^6
      const double w = 1.0 - r2;
      return eps * (-9.0 * std::pow(w, 5) + 30.0 * r2 * std::pow(w, 4));
    });
    CHECK(max_abs_diff(R[0], lap) < 1e-2 * lap.max_abs());
  }
}
