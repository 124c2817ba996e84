#include <doctest.h>

#include "helpers.hpp"
#include "hgr/evolution.hpp"
#include "hgr/reduction.hpp"

using namespace hgr;
using namespace hgr::test;

namespace {

StateField slice_state(const Grid3& g, double amplitude) {
  SliceSpec spec;
  spec.amplitude = amplitude;
  spec.radius = 1.5;
  return initial_state(minkowski_slice(g, spec));
}

}  // namespace

TEST_SUITE("reduction") {
  TEST_CASE("Minkowski has the zero first-order state") {
    const Grid3 g(16, 3.0);
    std::array<ScalarField, kN> gt;
    for (auto& f : gt) f = ScalarField(g);
    const StateField U = to_first_order(MetricField::minkowski(g), gt);
    CHECK(U.max_abs() == 0.0);
  }

  TEST_CASE("a bump in g_11 only fills the three h_11 gradient slots") {
    const Grid3 g(16, 4.0);
    MetricField m = MetricField::minkowski(g);
    m.g[sym_index(1, 1)] += bump(g, 1.5, 6, 0.2, 0.0, 0.0);
    std::array<ScalarField, kN> gt;
    for (auto& f : gt) f = ScalarField(g);
    const StateField U = to_first_order(m, gt);
    for (int a = 0; a < 3; ++a)
      for (int c = 0; c < kN; ++c) {
        if (c == sym_index(1, 1)) CHECK(U.ux(a, c).max_abs() > 0.0);
        else CHECK(U.ux(a, c).is_zero());
      }
  }

  TEST_CASE("product round trip") {
    const Grid3 g(8, 3.0);
    StateField U = StateField::zeros(g);
    for (int i = 0; i < kStateSize; ++i) U.comp[i][i] = i + 1.0;
    const StateField back = StateField::from_product(U.as_product());
    for (int i = 0; i < kStateSize; ++i) CHECK(max_abs_diff(back.comp[i], U.comp[i]) == 0.0);
  }

  TEST_CASE("B(U)U reproduces -Q / (-g^00) in the ut rows") {
    const Grid3 g(16, 6.0);
    const StateField U = slice_state(g, 0.05);
    const StateField BU = assemble_B(U).apply(U);
    CHECK(max_abs_diff(BU.u(3), U.ut(3)) == 0.0);
    double worst = 0.0, scale = 0.0;
    for (std::size_t idx = 0; idx < g.size(); idx += 3) {
      const Mat4 gi = invert4(U.metric_at(idx));
      const Mat4 Q = reduced_Q_point(gi, U.derivatives_at(idx));
      for (int c = 0; c < kN; ++c) {
        const auto p = sym_pair(c);
        const double expect = -Q[p[0]][p[1]] / (-gi[0][0]);
        worst = std::max(worst, std::abs(BU.ut(c)[idx] - expect));
        scale = std::max(scale, std::abs(expect));
      }
    }
    CHECK(scale > 0.0);
    CHECK(worst <= 1e-12 * scale);
  }

  TEST_CASE("matrices are pointwise symmetric where the structure requires it") {
    const Grid3 g(16, 6.0);
    const StateField U = slice_state(g, 0.05);
    const BlockMatrixField A0 = assemble_A0(U);
    for (int axis = 0; axis < 3; ++axis) {
      const BlockMatrixField Aa = assemble_Aa(U, axis);
      const BlockMatrixField Ca = constant_Ca(g, axis);
      for (std::size_t idx : {std::size_t(0), g.index(8, 8, 8), g.index(7, 9, 8)}) {
        const Eigen::MatrixXd a0 = A0.dense_at(idx);
        const Eigen::MatrixXd aa = Aa.dense_at(idx);
        const Eigen::MatrixXd ca = Ca.dense_at(idx);
        CHECK((a0 - a0.transpose()).cwiseAbs().maxCoeff() <= 1e-14);
        CHECK((aa - aa.transpose()).cwiseAbs().maxCoeff() <= 1e-14);
        CHECK((ca - ca.transpose()).cwiseAbs().maxCoeff() <= 1e-14);
        // A0 is positive definite
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a0);
        CHECK(es.eigenvalues().minCoeff() > 0.0);
      }
    }
  }

  TEST_CASE("system residual vanishes for the computed time derivative") {
    const Grid3 g(16, 6.0);
    const StateField U = slice_state(g, 0.05);
    const StateField dU = rhs(U, U);
    const StateField res = system_residual(U, dU);
    CHECK(res.max_abs() <= 1e-12 * std::max(dU.max_abs(), 1.0));
  }

  TEST_CASE("structure check passes on small slice data") {
    const Grid3 g(32, 6.0);
    const StateField U = slice_state(g, 1e-3);
    const auto rep = check_state_structure(U, build_partition(g, default_j_max(g)), 1.6, -1.0);
    INFO(rep.to_text());
    CHECK(rep.pass());
    CHECK(rep.c0 >= 1.0);
    CHECK(rep.find("b_structure") != nullptr);
  }
}
