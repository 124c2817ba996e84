#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "hgr/geometry.hpp"
#include "hgr/grid.hpp"
#include "hgr/sobolev.hpp"

namespace hgr {

inline constexpr int kStateSize = 5 * kN;

/// First-order unknown U = (u, ut, ux) with u = g - m, ut = d_t g and
/// ux[a] = d_a g, stored as 50 fields: u(c) = [c], ut(c) = [10 + c],
/// ux(a, c) = [20 + 10 a + c].
struct StateField {
  std::vector<ScalarField> comp;

  static StateField zeros(const Grid3& grid);
  const Grid3& grid() const { return comp.front().grid(); }

  ScalarField& u(int c) { return comp[c]; }
  const ScalarField& u(int c) const { return comp[c]; }
  ScalarField& ut(int c) { return comp[kN + c]; }
  const ScalarField& ut(int c) const { return comp[kN + c]; }
  ScalarField& ux(int a, int c) { return comp[2 * kN + kN * a + c]; }
  const ScalarField& ux(int a, int c) const { return comp[2 * kN + kN * a + c]; }

  StateField& axpy(double a, const StateField& o);
  StateField& operator*=(double a);
  double max_abs() const;
  bool is_finite() const;

  /// g = m + u at a point.
  Mat4 metric_at(std::size_t idx) const;
  /// X[c][a][b] = d_c g_ab from (ut, ux) at a point.
  Deriv1 derivatives_at(std::size_t idx) const;

  ProductState as_product() const;
  static StateField from_product(const ProductState& v);
};

/// u = g - m, ut = gt, ux = centered spatial gradient (order 4) of g.
StateField to_first_order(const MetricField& g, const std::array<ScalarField, kN>& gt);

/// Reconstructs g = m + u with inverse populated (throws on signature loss).
MetricField metric_from_state(const StateField& U);

// ---- block matrices ---------------------------------------------------------

/// One N x N block: zero, coeff(x) * identity, or dense.
struct Block {
  enum class Kind { Zero, Identity, Dense };
  Kind kind = Kind::Zero;
  bool constant = true;            ///< identity coefficient equal at every point
  double value = 0.0;              ///< coefficient when constant
  ScalarField coeff;               ///< coefficient field when not constant
  std::vector<ScalarField> dense;  ///< N*N entries, row-major, when Dense

  static Block zero() { return {}; }
  static Block identity(double v);
  static Block identity(ScalarField c);
  double entry(std::size_t idx, int r, int c) const;
  double coefficient(std::size_t idx) const { return constant ? value : coeff[idx]; }
};

/// Pointwise 50x50 matrix as 5x5 blocks of size N: block rows/cols are
/// (u, ut, ux_1, ux_2, ux_3).
struct BlockMatrixField {
  Grid3 grid;
  std::array<std::array<Block, 5>, 5> blocks;

  explicit BlockMatrixField(const Grid3& g) : grid(g) {}
  Eigen::MatrixXd dense_at(std::size_t idx) const;
  /// Multiplies the matrix at every point by a state: (M U)(x) = M(x) U(x).
  StateField apply(const StateField& U) const;
};

BlockMatrixField assemble_A0(const StateField& U);
BlockMatrixField assemble_Aa(const StateField& U, int axis);
BlockMatrixField constant_Ca(const Grid3& grid, int axis);
/// Row 1: d_t u = ut. Row 2: -Q_bil(e_c, X) / (-g^00) against each ut and ux
/// column c, so that (B(U) U)_2 = -Q(X) / (-g^00).
BlockMatrixField assemble_B(const StateField& U);

/// Tilde-g^{ab} (spatial block of A0) as an A33Field.
A33Field a33_from_state(const StateField& U);

struct ConditionResult {
  std::string tag;
  bool pass = true;
  std::string detail;
};

struct StructureReport {
  std::vector<ConditionResult> conditions;
  double c0 = 0.0;
  double a0_minus_e_norm = 0.0;   ///< sqrt(sum over components of ||.||^2_{H_{s+1,delta}})
  double aa_max = 0.0;            ///< max |entry| of A^a over points and axes
  double b_tilde_max = 0.0;       ///< max |entry| of the state-dependent part of B

  bool pass() const;
  const ConditionResult* find(const std::string& tag) const;
  std::string to_text() const;
};

/// Condition tags: a0_block_identity, a33_spd, a0_minus_identity_finite,
/// aa_symmetric_zero_border, ca_constant_symmetric, b_structure.
StructureReport check_structure(const BlockMatrixField& A0, const std::array<BlockMatrixField, 3>& Aa,
                                const std::array<BlockMatrixField, 3>& Ca,
                                const BlockMatrixField& B, const DyadicPartition& p, double s,
                                double delta);

/// Convenience: assembles all matrices from U and checks them.
StructureReport check_state_structure(const StateField& U, const DyadicPartition& p, double s,
                                      double delta);

/// The semi-discrete residual A0 d_tU - sum (A^a + C^a) d_aU - B(U) U for
/// supplied time derivative dUdt, with spatial derivatives of order 4.
StateField system_residual(const StateField& U, const StateField& dUdt);

}  // namespace hgr
