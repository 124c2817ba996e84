#pragma once

#include <array>
#include <string>
#include <vector>

#include "hgr/geometry.hpp"
#include "hgr/grid.hpp"

namespace hgr {

/// Spatial symmetric component order (11,12,13,22,23,33).
int sym3_index(int a, int b);

using Mat3 = std::array<std::array<double, 3>, 3>;

/// Riemannian 3-metric h_ab and extrinsic curvature K_ab.
struct ADMData {
  std::array<ScalarField, 6> h;
  std::array<ScalarField, 6> K;

  static ADMData flat(const Grid3& grid);
  const Grid3& grid() const { return h[0].grid(); }
  Mat3 h_at(std::size_t idx) const;
  Mat3 K_at(std::size_t idx) const;
  /// Throws PreconditionError at the first point where h is not positive definite.
  void validate() const;
};

/// R(h) - K_ab K^ab + (tr K)^2 with centered differences of the given order;
/// points closer than order/2 cells to the box seam are set to zero.
ScalarField hamiltonian_residual(const ADMData& d, int order = 2);
/// D_a K^a_b - D_b tr K, same conventions.
std::array<ScalarField, 3> momentum_residual(const ADMData& d, int order = 2);
/// Scalar curvature of h alone.
ScalarField scalar_curvature(const ADMData& d, int order = 2);

// ---- conformal solve --------------------------------------------------------

/// Conformally flat, maximal free data plus optional excised point mass.
struct ConformalSeed {
  ADMData free;                  ///< h must be the identity; K trace- and divergence-free
  double mass = 0.0;             ///< M >= 0
  double excision_radius = 0.0;  ///< points with r < excision_radius hold 1 + M/(2r)
  ScalarField phi;               ///< initial guess (empty: 1 everywhere outside the excision)
};

struct LichnerowiczOptions {
  int max_newton = 50;
  int max_halvings = 5;
  double newton_tol = 1e-11;  ///< on max |correction|
  double linear_tol = 1e-13;
  /// Relative tolerances on the free data checks.
  double trace_tol = 1e-12;
  double divergence_tol = 0.1;  // O(1) for data that is not divergence-free
  bool robin_outer = true;  ///< false: phi = 1 on the outer boundary layer
};

struct LichnerowiczResult {
  ADMData data;
  ScalarField phi;
  int newton_iterations = 0;
  std::vector<double> correction_history;
  int linear_iterations = 0;
};

/// Solves Lap phi = -(1/8) |Kbar|^2 phi^{-7} with the 7-point Laplacian on the
/// non-periodic box. Outer boundary layer: Robin rows matching 1 + c/r decay.
/// Excised points: Dirichlet 1 + M/(2r). Returns h = phi^4 e, K = phi^{-2} Kbar.
LichnerowiczResult lichnerowicz_solve(const ConformalSeed& seed, const LichnerowiczOptions& opt = {});

/// Mask of points that are neither excised nor on the outer boundary layer.
std::vector<char> lichnerowicz_interior(const Grid3& grid, double excision_radius);

// ---- Cauchy data ------------------------------------------------------------

struct CauchyData {
  MetricField g;
  std::array<ScalarField, kN> gt;
};

/// g00 = -1, g0a = 0, gab = hab, d_t gab = -2 Kab; d_t g00 and d_t g0a are
/// fixed so that F^mu = 0 with fourth-order spatial differences:
///   d_t g00 = 2 h^{ab} K_ab,  d_t g0a = h^{bc} (d_c h_ab - d_a h_bc / 2).
CauchyData assemble_cauchy_data(const ADMData& d);

// ---- seeds ------------------------------------------------------------------

/// h = (1 + M/(2 max(r, r_floor)))^4 e, K = 0.
ADMData schwarzschild_isotropic(const Grid3& grid, double mass, double r_floor);

/// Trace-free, divergence-free K built from third derivatives of the compact
/// bump f = (1 - |x-c|^2/R^2)^p: with n = e_3 the nonzero components are
///   K11 = -K22 = 2 f_123, K12 = f_223 - f_113, K13 = -f_222 - f_112,
///   K23 = f_111 + f_122.
/// Scaled so that max |K| over the grid equals amplitude.
std::array<ScalarField, 6> tt_curvature(const Grid3& grid, double amplitude, double radius,
                                        int power = 8, std::array<double, 3> center = {0, 0, 0});

struct SeedSpec {
  std::string kind = "zero";  ///< zero | gaussian-tt | schwarzschild-excision
  double amplitude = 1e-3;
  double radius = 1.5;
  int power = 8;
  double mass = 0.0;
  double excision_radius = 0.5;
};

ConformalSeed make_seed(const Grid3& grid, const SeedSpec& spec);
std::vector<std::string> seed_kinds();

/// Which hypothesis window a weight delta falls in, as text.
std::string delta_window(double delta);

}  // namespace hgr
