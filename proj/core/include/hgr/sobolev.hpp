#pragma once

#include <array>
#include <string>
#include <vector>

#include "hgr/grid.hpp"

namespace hgr {

// ---- dyadic partition -------------------------------------------------------

/// Order-7 smoothstep: 0 for t <= 0, 1 for t >= 1, C^3 at both ends.
double smoothstep7(double t);

/// Radial cutoff profile: 1 on [1/8, 4], vanishing outside (1/16, 8).
double chi_profile(double r);
/// psi_j evaluated at radius r; psi_0 is 1 on [0, 4] and vanishes beyond 8.
double psi_radial(int j, double r);
/// Derivatives d/dr and d^2/dr^2 of psi_radial (analytic).
double psi_radial_d1(int j, double r);
double psi_radial_d2(int j, double r);

struct DyadicPartition {
  Grid3 grid;
  int j_max = 0;
  std::vector<ScalarField> psi;       ///< psi_0 .. psi_jmax
  std::vector<ScalarField> psi_caps;  ///< Psi_k = psi_k / sum_j psi_j

  /// True when psi_j is not identically zero on the grid.
  bool active(int j) const;
};

/// Requires j_max >= 1 and 2^{j_max+3} >= L. Throws PreconditionError naming
/// the first grid point where sum_j psi_j < 1.
DyadicPartition build_partition(const Grid3& grid, int j_max);

/// Smallest j_max whose partition covers the whole box.
int default_j_max(const Grid3& grid);

struct PartitionCheck {
  bool plateau = true;         ///< psi_j == 1 on K_j
  bool support = true;         ///< psi_j == 0 off its annulus
  bool sums_to_one = true;     ///< sum_k Psi_k == 1
  bool derivative_bound = true;
  bool overlap_stated = true;  ///< Psi_k psi_j == 0 unless k in {j-3..j+4}
  bool overlap_support = true; ///< Psi_k psi_j == 0 unless |k-j| <= 6
  double max_sum_error = 0.0;
  /// Largest 2^{|alpha| j} max|D^alpha psi_j| over j, for |alpha| = 1, 2, and
  /// the j-independent analytic bound it is compared against.
  std::array<double, 2> scaled_derivative{0.0, 0.0};
  std::array<double, 2> derivative_bound_value{0.0, 0.0};
  /// Pairs (k, j) with nonzero Psi_k psi_j outside the stated window.
  std::vector<std::array<int, 2>> stated_window_violations;
  std::string first_failure;

  bool all_stated() const {
    return plateau && support && sums_to_one && derivative_bound && overlap_stated;
  }
};

PartitionCheck check_partition(const DyadicPartition& p);

// ---- norms ------------------------------------------------------------------

struct NormParams {
  double s = 0.0;
  double delta = 0.0;
  double gamma = 1.0;
  int m = 0;
  double beta = 0.0;
};

/// Weighted inner product sum_j 2^{(3/2+delta)2j} <(psi_j^gamma u)_{2^j},
/// (psi_j^gamma v)_{2^j}>_{H^s}. The dilation is carried by the symbol: the
/// j-th term equals 2^{2 delta j} <Lambda^s_{2^j}(psi_j^gamma u), ...> on the
/// original grid, so no resampling is needed.
double inner_hsd(const ScalarField& u, const ScalarField& v, const DyadicPartition& p,
                 const NormParams& params, const SupportPolicy& policy = {});
double norm_hsd(const ScalarField& u, const DyadicPartition& p, const NormParams& params,
                const SupportPolicy& policy = {});
/// Individual j terms of norm_hsd^2 (index j).
std::vector<double> hsd_terms(const ScalarField& u, const DyadicPartition& p,
                              const NormParams& params, const SupportPolicy& policy = {});

/// ( sum_{|alpha|<=m} ||(1+|x|)^{delta+|alpha|} D^alpha u||^2 )^{1/2}, m <= 2,
/// fourth-order centered differences.
double norm_weighted_integer(const ScalarField& u, int m, double delta);

/// sum_{|alpha|<=m} sup (1+|x|)^{beta+|alpha|} |D^alpha u|, m <= 2.
double norm_cmb(const ScalarField& u, int m, double beta);

/// ||u||_{L^2_delta} = ||(1+|x|)^delta u||_{L^2}.
double norm_l2_weighted(const ScalarField& u, double delta);

// ---- product spaces ---------------------------------------------------------

/// V = (v1, v2, v3) with N, N, 3N components. v3 is indexed [N*a + c] for
/// spatial axis a and component c.
struct ProductState {
  std::vector<ScalarField> v1, v2, v3;

  static ProductState zeros(const Grid3& grid, int n_components = 10);
  int components() const { return int(v1.size()); }
  const Grid3& grid() const { return v1.front().grid(); }
  void validate() const;
};

/// Symmetric positive definite 3x3 matrix field G^{ab}; acts on v3 as
/// (G (x) e_N): (a33 v3)_{a,c} = sum_b G^{ab} v3_{b,c}.
struct A33Field {
  std::array<ScalarField, 6> g;  ///< 11, 12, 13, 22, 23, 33

  static A33Field identity(const Grid3& grid);
  static A33Field scaled_identity(const Grid3& grid, double factor);
  const Grid3& grid() const { return g[0].grid(); }
  double at(std::size_t idx, int a, int b) const;
};

/// Returns c0 = max over points of max(lambda_max, 1/lambda_min). Throws
/// PreconditionError at the first point that is not positive definite.
double a33_c0(const A33Field& a33);

double norm_X(const ProductState& V, const DyadicPartition& p, double s, double delta,
              const SupportPolicy& policy = {});
double inner_X_A0(const ProductState& V, const ProductState& Phi, const A33Field& a33,
                  const DyadicPartition& p, double s, double delta,
                  const SupportPolicy& policy = {});

double norm_Y(const ProductState& V, double delta);
double inner_Y_a33(const ProductState& V, const ProductState& Phi, const A33Field& a33,
                   double delta);

}  // namespace hgr
