#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>

#include "hgr/grid.hpp"

namespace hgr {

/// Number of independent components of a symmetric 4x4 tensor.
inline constexpr int kN = 10;

/// Component order (00,01,02,03,11,12,13,22,23,33).
int sym_index(int a, int b);
std::array<int, 2> sym_pair(int c);

using Mat4 = std::array<std::array<double, 4>, 4>;
/// dg[c][a][b] = d_c g_ab, c = 0 is the time derivative.
using Deriv1 = std::array<Mat4, 4>;
/// ddg[c][d][a][b] = d_c d_d g_ab (symmetric in c, d).
using Deriv2 = std::array<std::array<Mat4, 4>, 4>;
/// gam[m][b][c] = Gamma^m_{bc}.
using Christoffel4 = std::array<Mat4, 4>;

Mat4 minkowski4();
Mat4 zero4();

/// Inverse and determinant of a symmetric 4x4 matrix.
Mat4 invert4(const Mat4& g, double* det = nullptr);

// ---- pointwise kernels ------------------------------------------------------

Christoffel4 christoffel_point(const Mat4& ginv, const Deriv1& dg);
/// F^m = g^{bc} Gamma^m_{bc}.
std::array<double, 4> gauge_F_point(const Mat4& ginv, const Deriv1& dg);
/// R_ab from Christoffel symbols and their derivatives.
Mat4 ricci_point(const Mat4& ginv, const Deriv1& dg, const Deriv2& ddg);
/// Quadratic part of the harmonic reduction:
/// Q_ab = 2 g^{cd} g^{ef} (d_e g_ca d_f g_db - Gamma_ace Gamma_bdf),
/// Gamma_ace = (d_e g_ac + d_c g_ae - d_a g_ce) / 2. With F_a = g_am F^m,
/// g^{cd} d_c d_d g_ab - Q_ab + 2 R_ab - (d_a F_b + d_b F_a - 2 Gamma^c_ab F_c) = 0.
Mat4 reduced_Q_point(const Mat4& ginv, const Deriv1& dg);
/// Symmetric bilinear form with reduced_Q_bilinear(g, X, X) == reduced_Q_point(g, X).
Mat4 reduced_Q_bilinear(const Mat4& ginv, const Deriv1& x, const Deriv1& y);
/// dF[c][m] = d_c F^m.
std::array<std::array<double, 4>, 4> gauge_F_gradient_point(const Mat4& ginv, const Deriv1& dg,
                                                           const Deriv2& ddg);
/// The gauge terms d_a F_b + d_b F_a - 2 Gamma^c_ab F_c with F_a lowered.
Mat4 gauge_terms_point(const Mat4& g, const Mat4& ginv, const Deriv1& dg, const Deriv2& ddg);

/// Counts of negative and positive eigenvalues with |lambda| > margin.
struct SignatureInfo {
  int negative = 0;
  int positive = 0;
  bool lorentzian() const { return negative == 1 && positive == 3; }
};
SignatureInfo signature(const Mat4& g, double margin = 1e-6);

// ---- fields -----------------------------------------------------------------

/// Symmetric 4-metric on a grid with its inverse and tilde-g = g^{ab}/(-g^{00}).
struct MetricField {
  Grid3 grid;
  std::array<ScalarField, kN> g;
  std::array<ScalarField, kN> ginv;
  std::array<ScalarField, kN> gtilde;

  static MetricField minkowski(const Grid3& grid);
  /// From components; inverse not yet populated.
  static MetricField from_components(std::array<ScalarField, kN> comps);

  Mat4 metric_at(std::size_t idx) const;
  Mat4 inverse_at(std::size_t idx) const;
  bool has_inverse() const { return ginv[0].size() == grid.size() && grid.size() > 0; }
};

/// Populates ginv and gtilde. Throws NumericError at the first point where
/// |det g| <= eps_det, the residual g^{-1} g - 1 exceeds 1e-12 (relative), the
/// signature is not (-,+,+,+) with margin 1e-6, or g^{00} >= 0.
void invert_metric(MetricField& m, double eps_det = 1e-10);

/// d_c g_ab fields: d[0] is the supplied time derivative, d[1..3] are spatial
/// centered differences of the given order.
struct MetricDerivatives {
  std::array<std::array<ScalarField, kN>, 4> d;
  Deriv1 at(std::size_t idx) const;
};
MetricDerivatives metric_derivatives(const MetricField& m, const std::array<ScalarField, kN>& gt,
                                     int order = 4);

/// d_c d_d g_ab fields, pairs (c <= d) indexed by sym_index(c, d).
struct MetricSecondDerivatives {
  std::array<std::array<ScalarField, kN>, kN> dd;
  Deriv2 at(std::size_t idx) const;
};
/// Spatial second derivatives by centered differences; d_t d_a g uses the
/// spatial derivatives of gt; d_t d_t g must be supplied.
MetricSecondDerivatives metric_second_derivatives(const MetricField& m,
                                                  const std::array<ScalarField, kN>& gt,
                                                  const std::array<ScalarField, kN>& gtt,
                                                  int order = 4);

/// Gamma^m_{bc} as 40 fields indexed [m][sym_index(b, c)].
struct ChristoffelField {
  std::array<std::array<ScalarField, kN>, 4> gamma;
  double at(std::size_t idx, int m, int b, int c) const { return gamma[m][sym_index(b, c)][idx]; }
};

ChristoffelField christoffel(const MetricField& m, const MetricDerivatives& dg);
std::array<ScalarField, 4> gauge_F(const MetricField& m, const MetricDerivatives& dg);
std::array<ScalarField, kN> ricci(const MetricField& m, const MetricDerivatives& dg,
                                  const MetricSecondDerivatives& ddg);
std::array<ScalarField, kN> reduced_rhs_Q(const MetricField& m, const MetricDerivatives& dg);

}  // namespace hgr
