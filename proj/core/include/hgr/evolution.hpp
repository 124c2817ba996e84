#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hgr/constraints.hpp"
#include "hgr/reduction.hpp"
#include "hgr/sobolev.hpp"

namespace hgr {

enum class EvolutionMode { Quasilinear, LinearFrozen, Picard };

std::string to_string(EvolutionMode m);
EvolutionMode parse_mode(const std::string& s);

struct MonitorSet {
  bool energy = true;       ///< E, ||U||_X, ||U||_{X,A0}, c0 (spectral; the costly part)
  bool y_energy = true;
  bool gauge = true;        ///< max |F|, max |d_t F|
  bool constraints = true;  ///< ADM constraint residuals
  bool ricci = true;        ///< max |R_ab|
};

struct EvolutionConfig {
  Grid3 grid;
  double dt = 0.0;  ///< 0: derived from cfl and the initial characteristic speed
  double T = 1.0;
  double cfl = 0.25;  ///< at most 0.5
  double s = 1.6;
  double delta = -1.0;
  int cadence = 1;
  EvolutionMode mode = EvolutionMode::Quasilinear;
  int k_max = 6;
  /// Sixth-order Kreiss-Oliger dissipation strength (0 disables).
  double dissipation = 0.0;
  SupportPolicy support;
  bool check_domain = true;
  MonitorSet monitors;
  std::size_t max_history_bytes = std::size_t(2) << 30;
  /// Abort when a Picard iterate grows beyond this multiple of the data norm.
  double divergence_factor = 10.0;
};

/// Largest characteristic speed |tilde-g^{0a}| + sqrt((tilde-g^{0a})^2 + tilde-g^{aa}).
double max_characteristic_speed(const StateField& U);
/// Radius of the smallest origin-centred ball containing the (relative) support.
double support_radius(const StateField& U, double rel_tol);

/// Coefficient source for the linear modes: state at time t.
using CoefficientTrack = std::function<const StateField&(double t, StateField& scratch)>;

/// dU/dt of A0(V) dU/dt = sum (A^a(V) + C^a) d_a U + B(V) U with V the
/// coefficient state (V = U for the quasilinear system). The third block row
/// is solved pointwise with the 3x3 tilde-g block.
StateField rhs(const StateField& U, const StateField& V, double dissipation = 0.0);

/// One classical RK4 step. `coeff` supplies V at intermediate times (null:
/// quasilinear). Throws NumericError on signature loss.
StateField rk4_step(const StateField& U, double t, double dt, const CoefficientTrack* coeff = nullptr,
                    double dissipation = 0.0);

struct MonitorRecord {
  int step = 0;
  double t = 0.0;
  double energy = 0.0;      ///< E = <U,U>_{X,A0} / 2
  double y_energy = 0.0;    ///< ||U||^2_{Y,a33}
  double norm_x = 0.0;      ///< ||U||_X
  double norm_xa0 = 0.0;    ///< ||U||_{X,A0}
  double c0 = 1.0;
  double max_F = 0.0;
  double max_dtF = 0.0;
  double max_H = 0.0;
  double max_M = 0.0;
  double max_R = 0.0;
  double max_U = 0.0;
};

struct MonitorSeries {
  std::vector<MonitorRecord> records;
  bool aborted = false;
  std::string abort_reason;
  double last_good_time = 0.0;

  static const std::vector<std::string>& csv_columns();
  void write_csv(const std::filesystem::path& path) const;
  std::string to_csv() const;
};

/// Monitors of a single state. dUdt may be supplied to avoid recomputing it.
MonitorRecord compute_monitors(const StateField& U, const DyadicPartition& p,
                               const EvolutionConfig& cfg, const StateField* dUdt = nullptr);

/// E(t) = <U, U>_{X_{s,delta}, A0} / 2.
double energy(const StateField& U, const DyadicPartition& p, double s, double delta,
              const SupportPolicy& policy = {});

struct EvolutionResult {
  MonitorSeries series;
  StateField final_state;
  double final_time = 0.0;
  int steps = 0;
  double dt = 0.0;
  std::vector<StateField> trajectory;  ///< per-step states when requested
};

struct EvolveOptions {
  bool keep_trajectory = false;
  /// Frozen coefficient state for LinearFrozen (null: Minkowski).
  const StateField* frozen = nullptr;
  /// Coefficient trajectory for Picard iterates (overrides frozen).
  const CoefficientTrack* track = nullptr;
  std::optional<std::filesystem::path> checkpoint;  ///< final state snapshot
  std::function<void(const MonitorRecord&)> on_record;
};

/// Time-steps U0 to cfg.T. Signature loss or non-finite values end the run
/// cleanly with series.aborted set and the last good time recorded.
EvolutionResult evolve(const StateField& U0, const EvolutionConfig& cfg, const EvolveOptions& opt = {});

/// Step size implied by the configuration for data U0 (checks CFL <= 0.5 and
/// the domain-of-dependence bound).
double choose_dt(const StateField& U0, const EvolutionConfig& cfg);

// ---- energy inequality ------------------------------------------------------

struct RateCheck {
  double c_hat = 0.0;
  double max_violation = 0.0;  ///< max_n rate_n / (c_hat c0_n (E_n + 1))
  int worst_interval = -1;
  bool pass(double slack = 2.0) const { return max_violation <= slack; }
};

/// Fits C from the first interval, C = |rate_0| / (c0_0 (E_0 + 1)), and
/// reports the largest ratio rate_n / (C c0_n (E_n + 1)).
RateCheck energy_rate_check(const MonitorSeries& series, bool use_y_energy = false);

struct SandwichCheck {
  double worst_lower = 0.0;  ///< min over records of ||U||_{X,A0} sqrt(c0) / ||U||_X
  double worst_upper = 0.0;  ///< max over records of ||U||_{X,A0} / (sqrt(c0) ||U||_X)
  bool pass() const { return worst_lower >= 1.0 - 1e-12 && worst_upper <= 1.0 + 1e-12; }
};
SandwichCheck norm_sandwich(const MonitorSeries& series);

// ---- Picard iteration -------------------------------------------------------

struct PicardIterate {
  int k = 0;
  double sup_norm_x = 0.0;       ///< sup_t ||U^k||_X
  double sup_diff_y = 0.0;       ///< sup_t ||U^k - U^{k-1}||_Y (k >= 1)
  MonitorSeries series;
};

struct PicardResult {
  std::vector<PicardIterate> iterates;
  std::vector<StateField> final_trajectory;  ///< last iterate, per step
  std::vector<double> times;
  double dt = 0.0;
  bool aborted = false;
  std::string abort_reason;
  /// d_k / d_{k-1} for consecutive successive differences.
  std::vector<double> ratios() const;
};

PicardResult picard_iterate(const StateField& U0, const EvolutionConfig& cfg);

// ---- uniqueness / continuous dependence ------------------------------------

struct UniquenessReport {
  bool identical_bitwise = false;
  double epsilon = 0.0;
  double c_hat = 0.0;
  std::vector<double> times;
  std::vector<double> distance;  ///< ||W(t)||_{Y, a33}
  double max_bound_ratio = 0.0;  ///< max_t distance / (epsilon e^{c_hat t})
  bool pass(double margin = 10.0) const { return identical_bitwise && max_bound_ratio <= margin; }
};

/// Runs U0 twice (bitwise comparison) and U0 + epsilon * direction with the
/// direction normalised so that ||W(0)||_{Y,a33} = epsilon.
UniquenessReport uniqueness_check(const StateField& U0, const StateField& direction, double epsilon,
                                  const EvolutionConfig& cfg);

/// Difference of two states on different grids of the same box, compared on
/// the coarse grid points (fine grid must be an integer refinement).
StateField restrict_to(const StateField& fine, const Grid3& coarse);

// ---- data -------------------------------------------------------------------

/// Slice of Minkowski space through the embedding X = (tau(x), x + xi(x)), with
/// compact bumps tau = a_t b(x - c_t), xi_i = a_x v_i b(x - c_x). The induced
/// (h, K) satisfy the constraints exactly, so the evolution stays flat.
struct SliceSpec {
  double amplitude = 1e-3;
  double radius = 1.5;
  int power = 6;
  double time_weight = 1.0;   ///< a_t = amplitude * time_weight
  double shift_weight = 1.0;  ///< a_x = amplitude * shift_weight
  std::array<double, 3> shift_direction{1.0, 0.5, -0.25};
  std::array<double, 3> time_center{0.1, -0.05, 0.0};
  std::array<double, 3> shift_center{-0.1, 0.0, 0.05};
};

ADMData minkowski_slice(const Grid3& grid, const SliceSpec& spec);

/// Cauchy data -> first-order state (ux from fourth-order differences).
StateField initial_state(const ADMData& d);

}  // namespace hgr
