#include "acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>

#include "hgr/constraints.hpp"
#include "hgr/error.hpp"
#include "hgr/evolution.hpp"
#include "hgr/finite_difference.hpp"
#include "hgr/geometry.hpp"
#include "hgr/reduction.hpp"
#include "hgr/sobolev.hpp"
#include "hgr/spectral.hpp"

namespace hgr::verify {
namespace {

constexpr double kPi = 3.14159265358979323846;

struct CriterionInfo {
  const char* title;
  double budget;
};

const std::map<int, CriterionInfo>& table() {
  static const std::map<int, CriterionInfo> t{
      {1, {"partition invariants (j_max 8, n 64, L 16)", 10}},
      {2, {"Lambda^s plane-wave exactness and composition", 60}},
      {3, {"integer-order norm equivalence, m = 0,1,2", 120}},
      {4, {"derivative, algebra, mixed-norm, embedding constants", 300}},
      {5, {"structure gate and negative controls", 30}},
      {6, {"constraint residual oracle (Schwarzschild, constant K)", 120}},
      {7, {"Lichnerowicz excision oracle", 180}},
      {8, {"Cauchy data harmonic gauge", 30}},
      {9, {"flat evolution stays flat", 60}},
      {10, {"gauge and constraint propagation, Ricci convergence", 900}},
      {11, {"energy inequality and norm sandwich", 900}},
      {12, {"Picard contraction", 1200}},
      {13, {"uniqueness and continuous dependence", 600}},
  };
  return t;
}

class Report {
 public:
  explicit Report(CriterionResult& r) : r_(r) {}
  template <class T>
  void kv(const std::string& key, const T& v) {
    std::ostringstream os;
    os.precision(6);
    os << key << " = " << v;
    r_.details.push_back(os.str());
  }
  void check(const std::string& key, bool ok) {
    kv(key, ok ? "ok" : "FAILED");
    all_ = all_ && ok;
  }
  bool all() const { return all_; }

 private:
  CriterionResult& r_;
  bool all_ = true;
};

// Compactly supported smooth bump (1 - |x-c|^2/R^2)^p modulated by a low
// frequency cosine; a sum of two such bumps per field.
ScalarField random_field(const Grid3& g, std::mt19937_64& rng, double max_center = 2.5) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  struct B {
    double c[3], R, a, k[3], ph;
  };
  B b[2];
  for (auto& x : b) {
    for (double& c : x.c) c = max_center * U(rng) / std::sqrt(3.0);
    x.R = 1.75 + 0.75 * U(rng);
    x.a = U(rng);
    if (std::abs(x.a) < 0.2) x.a = std::copysign(0.2, x.a);
    for (double& k : x.k) k = 1.5 * U(rng);
    x.ph = kPi * U(rng);
  }
  return ScalarField::from_function(g, [&](double x, double y, double z) {
    double v = 0.0;
    for (const auto& q : b) {
      const double d2 = (x - q.c[0]) * (x - q.c[0]) + (y - q.c[1]) * (y - q.c[1]) +
                        (z - q.c[2]) * (z - q.c[2]);
      const double w = 1.0 - d2 / (q.R * q.R);
      if (w <= 0.0) continue;
      v += q.a * std::pow(w, 6) * (1.0 + 0.5 * std::cos(q.k[0] * x + q.k[1] * y + q.k[2] * z + q.ph));
    }
    return v;
  });
}

// ---- 1 ----------------------------------------------------------------------

bool c1(Report& rep) {
  const Grid3 g(64, 16.0);
  const DyadicPartition p = build_partition(g, 8);
  const PartitionCheck c = check_partition(p);
  rep.check("plateau", c.plateau);
  rep.check("support", c.support);
  rep.check("sums_to_one", c.sums_to_one);
  rep.kv("max_sum_error", c.max_sum_error);
  rep.check("derivative_bound", c.derivative_bound);
  rep.kv("scaled_first_derivative", c.scaled_derivative[0]);
  rep.kv("first_derivative_bound", c.derivative_bound_value[0]);
  rep.kv("scaled_second_derivative", c.scaled_derivative[1]);
  rep.kv("second_derivative_bound", c.derivative_bound_value[1]);
  rep.check("overlap_window_j-3..j+4", c.overlap_stated);
  rep.kv("overlap_window_support_|k-j|<=6", c.overlap_support ? "ok" : "FAILED");
  if (!c.stated_window_violations.empty()) {
    std::ostringstream os;
    const std::size_t shown = std::min<std::size_t>(6, c.stated_window_violations.size());
    for (std::size_t i = 0; i < shown; ++i)
      os << (i ? " " : "") << "(k=" << c.stated_window_violations[i][0]
         << ",j=" << c.stated_window_violations[i][1] << ")";
    rep.kv("window_violations", std::to_string(c.stated_window_violations.size()) + ": " + os.str());
  }
  if (!c.first_failure.empty()) rep.kv("first_failure", c.first_failure);
  return rep.all();
}

// ---- 2 ----------------------------------------------------------------------

bool c2(Report& rep) {
  const Grid3 g(32, 4.0);
  SupportPolicy periodic;
  periodic.enforce = false;
  const double kx = kPi / g.half_width;
  const std::array<std::array<int, 3>, 3> waves{{{2, -3, 1}, {0, 5, 0}, {7, 1, -4}}};
  double worst = 0.0;
  for (const auto& m : waves) {
    const double k[3] = {kx * m[0], kx * m[1], kx * m[2]};
    const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    const ScalarField u = ScalarField::from_function(
        g, [&](double x, double y, double z) { return std::cos(k[0] * x + k[1] * y + k[2] * z + 0.3); });
    for (double s : {0.5, 1.7, 2.0}) {
      const ScalarField v = lambda_s(u, s, periodic);
      const double mult = std::pow(1.0 + k2, 0.5 * s);
      double err = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(v[i] - mult * u[i]));
      worst = std::max(worst, err / mult);
    }
  }
  rep.kv("plane_wave_max_rel_error", worst);
  rep.check("plane_wave_error < 1e-10", worst < 1e-10);

  std::mt19937_64 rng(7);
  const ScalarField u = random_field(g, rng, 0.5);
  double comp = 0.0;
  for (auto [a, b] : std::vector<std::pair<double, double>>{{0.5, 1.2}, {1.7, 0.3}, {1.0, 1.0}}) {
    const ScalarField lhs = lambda_s(lambda_s(u, a, periodic), b, periodic);
    const ScalarField rhs = lambda_s(u, a + b, periodic);
    comp = std::max(comp, (lhs - rhs).max_abs() / rhs.max_abs());
  }
  rep.kv("composition_max_rel_error", comp);
  rep.check("composition_error < 1e-10", comp < 1e-10);
  return rep.all();
}

// ---- 3 ----------------------------------------------------------------------

bool c3(Report& rep) {
  const Grid3 g(64, 8.0);
  const DyadicPartition p = build_partition(g, default_j_max(g));
  const double delta = -1.0;
  std::mt19937_64 rng(3);
  double lo = INFINITY, hi = 0.0;
  double mlo[3] = {INFINITY, INFINITY, INFINITY}, mhi[3] = {0, 0, 0};
  for (int f = 0; f < 20; ++f) {
    const ScalarField u = random_field(g, rng);
    for (int m = 0; m <= 2; ++m) {
      const double r = norm_hsd(u, p, NormParams{double(m), delta, 1.0, m, 0.0}) /
                       norm_weighted_integer(u, m, delta);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
      mlo[m] = std::min(mlo[m], r);
      mhi[m] = std::max(mhi[m], r);
    }
  }
  for (int m = 0; m <= 2; ++m)
    rep.kv("ratio_interval_m" + std::to_string(m),
           "[" + std::to_string(mlo[m]) + ", " + std::to_string(mhi[m]) + "]");
  rep.kv("c", lo);
  rep.kv("C", hi);
  rep.kv("C/c", hi / lo);
  rep.check("C/c <= 50", hi / lo <= 50.0);
  return rep.all();
}

// ---- 4 ----------------------------------------------------------------------

bool c4(Report& rep) {
  const Grid3 g(64, 8.0);
  const DyadicPartition p = build_partition(g, default_j_max(g));
  const double s = 1.6, d = -1.0;
  auto H = [&](const ScalarField& u, double ss, double dd) {
    return norm_hsd(u, p, NormParams{ss, dd, 1.0, 0, 0.0});
  };
  struct Ratios {
    double deriv, algebra, mixed, embed;
  };
  auto ratios = [&](const ScalarField& u, const ScalarField& v) {
    Ratios r{};
    const double hu = H(u, s, d);
    double dsum = 0.0;
    for (int a = 0; a < 3; ++a) {
      const ScalarField du = derivative(u, a);
      r.deriv = std::max(r.deriv, H(du, s - 1.0, d + 1.0) / hu);
      dsum += std::pow(H(du, s, d + 1.0), 2);
    }
    r.mixed = H(u, s + 1.0, d) / (hu + std::sqrt(dsum));
    // s1 = s2 = s, s1 + s2 > s + 3/2, delta1 + delta2 >= delta - 3/2
    r.algebra = H(multiply(u, v), s, -0.5) / (hu * H(v, s, d));
    r.embed = norm_cmb(u, 0, 0.0) / H(u, s, -1.4);
    return r;
  };
  auto corpus = [&](unsigned seed) {
    std::mt19937_64 rng(seed);
    Ratios mx{};
    for (int f = 0; f < 10; ++f) {
      const ScalarField u = random_field(g, rng, 1.5);
      const ScalarField v = random_field(g, rng, 1.5);
      const Ratios r = ratios(u, v);
      mx.deriv = std::max(mx.deriv, r.deriv);
      mx.algebra = std::max(mx.algebra, r.algebra);
      mx.mixed = std::max(mx.mixed, r.mixed);
      mx.embed = std::max(mx.embed, r.embed);
    }
    return mx;
  };
  const Ratios cal = corpus(1001), val = corpus(2002);
  auto one = [&](const char* name, double c, double v) {
    rep.kv(std::string(name) + "_fitted_C", c);
    rep.kv(std::string(name) + "_validation_max", v);
    rep.check(std::string(name) + "_validation <= 2 C", v <= 2.0 * c);
  };
  one("derivative", cal.deriv, val.deriv);
  one("algebra", cal.algebra, val.algebra);
  one("mixed_norm", cal.mixed, val.mixed);
  one("embedding", cal.embed, val.embed);
  return rep.all();
}

// ---- 5 ----------------------------------------------------------------------

StateField random_state(const Grid3& g, double amplitude, unsigned seed) {
  std::mt19937_64 rng(seed);
  StateField U = StateField::zeros(g);
  for (int c = 0; c < kN; ++c) {
    ScalarField u = random_field(g, rng, 0.5);
    u *= amplitude / u.max_abs();
    ScalarField ut = random_field(g, rng, 0.5);
    ut *= amplitude / ut.max_abs();
    U.u(c) = u;
    U.ut(c) = ut;
    for (int a = 0; a < 3; ++a) U.ux(a, c) = derivative(u, a);
  }
  return U;
}

ScalarField materialize(const Block& b, const Grid3& g) {
  return b.constant ? ScalarField(g, b.value) : b.coeff;
}

bool c5(Report& rep) {
  const Grid3 g(32, 6.0);
  const DyadicPartition p = build_partition(g, default_j_max(g));
  const double s = 1.6, delta = -1.0;

  {
    const StructureReport r = check_state_structure(StateField::zeros(g), p, s, delta);
    rep.check("minkowski_all_pass", r.pass());
    rep.check("minkowski_c0 == 1", std::abs(r.c0 - 1.0) < 1e-14);
  }

  SliceSpec slice;
  slice.radius = 1.0;
  ADMData tt = ADMData::flat(g);
  tt.K = tt_curvature(g, 1e-3, 1.5);
  const std::vector<std::pair<std::string, StateField>> states{
      {"slice", initial_state(minkowski_slice(g, slice))},
      {"tt", initial_state(tt)},
      {"random", random_state(g, 1e-3, 5)}};
  for (const auto& [name, U] : states) {
    const StructureReport r = check_state_structure(U, p, s, delta);
    rep.kv(name + "_c0", r.c0);
    rep.kv(name + "_a0_minus_e", r.a0_minus_e_norm);
    rep.check(name + "_all_pass", r.pass());
    rep.check(name + "_c0 <= 1.01", r.c0 <= 1.01);
  }

  const StateField& U = states[0].second;
  const std::size_t centre = g.index(g.n / 2, g.n / 2, g.n / 2);
  auto base = [&] {
    struct M {
      BlockMatrixField A0;
      std::array<BlockMatrixField, 3> Aa, Ca;
      BlockMatrixField B;
    };
    return M{assemble_A0(U),
             {assemble_Aa(U, 0), assemble_Aa(U, 1), assemble_Aa(U, 2)},
             {constant_Ca(g, 0), constant_Ca(g, 1), constant_Ca(g, 2)},
             assemble_B(U)};
  };
  auto control = [&](const std::string& tag, auto&& corrupt) {
    auto m = base();
    corrupt(m);
    const StructureReport r = check_structure(m.A0, m.Aa, m.Ca, m.B, p, s, delta);
    const ConditionResult* c = r.find(tag);
    const bool caught = c && !c->pass && !r.pass();
    rep.check("negative_control_" + tag, caught);
  };
  control("a0_block_identity", [](auto& m) { m.A0.blocks[0][0] = Block::identity(2.0); });
  control("a33_spd", [&](auto& m) {
    ScalarField f = materialize(m.A0.blocks[2][2], g);
    f[centre] = -1.0;
    m.A0.blocks[2][2] = Block::identity(f);
  });
  control("aa_symmetric_zero_border", [&](auto& m) {
    ScalarField f = materialize(m.Aa[0].blocks[1][2], g);
    f[centre] += 0.1;
    m.Aa[0].blocks[1][2] = Block::identity(f);
  });
  control("ca_constant_symmetric", [&](auto& m) {
    ScalarField f(g, 1.0);
    f[centre] = 1.5;
    m.Ca[1].blocks[1][3] = Block::identity(f);
    m.Ca[1].blocks[3][1] = Block::identity(f);
  });
  control("b_structure", [](auto& m) { m.B.blocks[2][0] = Block::identity(1e-3); });
  return rep.all();
}

// ---- 6 ----------------------------------------------------------------------

bool c6(Report& rep) {
  const double M = 0.1, L = 5.0;
  std::vector<ScalarField> H;
  for (int n : {32, 64, 128}) {
    const Grid3 g(n, L);
    H.push_back(hamiltonian_residual(schwarzschild_isotropic(g, M, 0.25 * g.spacing()), 2));
  }
  const Grid3 gc(32, L);
  double res[3] = {0, 0, 0}, d01 = 0.0, d12 = 0.0;
  for (int i = 0; i < gc.n; ++i)
    for (int j = 0; j < gc.n; ++j)
      for (int k = 0; k < gc.n; ++k) {
        const double r = gc.radius(gc.index(i, j, k));
        if (r < 0.5 || r > 4.0) continue;
        double v[3];
        for (int l = 0; l < 3; ++l) {
          const int f = 1 << l;
          v[l] = H[l].at(f * i, f * j, f * k);
          res[l] = std::max(res[l], std::abs(v[l]));
        }
        d01 = std::max(d01, std::abs(v[0] - v[1]));
        d12 = std::max(d12, std::abs(v[1] - v[2]));
      }
  const double ratio = d01 / d12;
  rep.kv("max_residual_n32_n64_n128", std::to_string(res[0]) + " " + std::to_string(res[1]) + " " +
                                          std::to_string(res[2]));
  rep.kv("self_convergence_ratio", ratio);
  rep.check("ratio in [3, 5]", ratio >= 3.0 && ratio <= 5.0);

  const Grid3 g(32, 4.0);
  const double k = 0.01;
  ADMData d = ADMData::flat(g);
  for (int q : {0, 3, 5}) d.K[q] = ScalarField(g, k);
  const ScalarField h = hamiltonian_residual(d, 2);
  const auto mom = momentum_residual(d, 2);
  double herr = 0.0, merr = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.boundary_distance(i) < 1) continue;
    herr = std::max(herr, std::abs(h[i] - 6.0 * k * k));
    for (const auto& m : mom) merr = std::max(merr, std::abs(m[i]));
  }
  rep.kv("constant_K_hamiltonian_error", herr);
  rep.kv("constant_K_momentum_max", merr);
  rep.check("constant_K_matched_to_1e-10", herr <= 1e-10 && merr <= 1e-10);
  return rep.all();
}

// ---- 7 ----------------------------------------------------------------------

bool c7(Report& rep) {
  const double M = 0.1, rex = 0.5, L = 4.0;
  const double scale = M / (rex * rex * rex);
  double prev = 0.0;
  for (int n : {32, 64}) {
    const Grid3 g(n, L);
    SeedSpec spec;
    spec.kind = "schwarzschild-excision";
    spec.mass = M;
    spec.excision_radius = rex;
    const LichnerowiczResult r = lichnerowicz_solve(make_seed(g, spec));
    const auto mask = lichnerowicz_interior(g, rex);
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (mask[i]) err = std::max(err, std::abs(r.phi[i] - (1.0 + M / (2.0 * g.radius(i)))));
    const double dx = g.spacing();
    const double bound = 5.0 * dx * dx * scale;
    const std::string tag = "n" + std::to_string(n);
    rep.kv(tag + "_max_error", err);
    rep.kv(tag + "_bound", bound);
    rep.kv(tag + "_newton_iterations", r.newton_iterations);
    rep.check(tag + "_error <= 5 dx^2 M / r_ex^3", err <= bound);
    if (prev > 0.0) {
      const double ratio = prev / err;
      rep.kv("refinement_ratio", ratio);
      rep.kv("observed_order", std::log2(ratio));
      rep.check("second_order (ratio >= 3)", ratio >= 3.0);
    }
    prev = err;
  }
  return rep.all();
}

// ---- 8 ----------------------------------------------------------------------

double max_gauge(const CauchyData& c) {
  const MetricDerivatives dg = metric_derivatives(c.g, c.gt, 4);
  double m = 0.0;
  for (const auto& f : gauge_F(c.g, dg)) m = std::max(m, f.max_abs());
  return m;
}

bool c8(Report& rep) {
  const Grid3 g(32, 4.0);
  for (const std::string& kind : seed_kinds()) {
    SeedSpec spec;
    spec.kind = kind;
    if (kind == "schwarzschild-excision") spec.mass = 0.1;
    const ConformalSeed seed = make_seed(g, spec);
    const LichnerowiczResult sol = lichnerowicz_solve(seed);
    const double f = max_gauge(assemble_cauchy_data(sol.data));
    rep.kv("seed_" + kind + "_max_F", f);
    rep.check("seed_" + kind + "_F <= 1e-10", f <= 1e-10);
  }
  SliceSpec slice;
  slice.radius = 1.0;
  const double f = max_gauge(assemble_cauchy_data(minkowski_slice(g, slice)));
  rep.kv("slice_max_F", f);
  rep.check("slice_F <= 1e-10", f <= 1e-10);
  return rep.all();
}

// ---- 9 ----------------------------------------------------------------------

bool c9(Report& rep) {
  EvolutionConfig cfg;
  cfg.grid = Grid3(32, 6.0);
  cfg.dt = 0.25 * cfg.grid.spacing();
  cfg.T = 200 * cfg.dt;
  cfg.cadence = 200;
  cfg.monitors = MonitorSet{false, false, true, false, true};
  const EvolutionResult r = evolve(StateField::zeros(cfg.grid), cfg);
  rep.kv("steps", r.steps);
  rep.kv("max_U", r.final_state.max_abs());
  rep.check("completed", !r.series.aborted && r.steps == 200);
  rep.check("max_U <= 1e-12", r.final_state.max_abs() <= 1e-12);
  return rep.all();
}

// ---- bump runs shared by 10, 11 ----------------------------------------------

constexpr double kBumpRadius = 1.0;  // crossing time = bump radius at unit speed
constexpr double kBox = 6.0;

EvolutionConfig bump_config(int n) {
  EvolutionConfig cfg;
  cfg.grid = Grid3(n, kBox);
  cfg.T = kBumpRadius;
  cfg.cfl = 0.25;
  cfg.cadence = 1;
  return cfg;
}

StateField bump_data(const Grid3& g, double amplitude) {
  SliceSpec spec;
  spec.amplitude = amplitude;
  spec.radius = kBumpRadius;
  return initial_state(minkowski_slice(g, spec));
}

bool c10(Report& rep) {
  EvolutionConfig cfg = bump_config(32);
  cfg.monitors = MonitorSet{false, false, true, true, true};
  const EvolutionResult coarse = evolve(bump_data(cfg.grid, 1e-3), cfg);
  rep.check("coarse_run_completed", !coarse.series.aborted);
  const auto& rec = coarse.series.records;
  const MonitorRecord& r0 = rec.front();
  const double f_ref = std::max(r0.max_F, cfg.T * r0.max_dtF);
  double fmax = 0.0, hmax = 0.0, mmax = 0.0, rc = 0.0;
  for (const auto& r : rec) {
    fmax = std::max(fmax, r.max_F);
    hmax = std::max(hmax, r.max_H);
    mmax = std::max(mmax, r.max_M);
    rc = std::max(rc, r.max_R);
  }
  rep.kv("F_reference", f_ref);
  rep.kv("F_max", fmax);
  rep.kv("H_initial", r0.max_H);
  rep.kv("H_max", hmax);
  rep.kv("M_initial", r0.max_M);
  rep.kv("M_max", mmax);
  rep.check("F <= 10 x reference", fmax <= 10.0 * f_ref);
  rep.check("H <= 10 x initial", hmax <= 10.0 * r0.max_H);
  rep.check("M <= 10 x initial", mmax <= 10.0 * r0.max_M);

  EvolutionConfig fcfg = bump_config(64);
  fcfg.monitors = MonitorSet{false, false, false, false, true};
  fcfg.cadence = 2;
  const EvolutionResult fine = evolve(bump_data(fcfg.grid, 1e-3), fcfg);
  rep.check("fine_run_completed", !fine.series.aborted);
  double rf = 0.0;
  for (const auto& r : fine.series.records) rf = std::max(rf, r.max_R);
  const double ratio = rc / rf;
  rep.kv("R_max_n32", rc);
  rep.kv("R_max_n64", rf);
  rep.kv("R_ratio", ratio);
  rep.check("R second order (ratio >= 3)", ratio >= 3.0);
  return rep.all();
}

bool c11(Report& rep) {
  EvolutionConfig cfg = bump_config(32);
  cfg.monitors = MonitorSet{true, true, false, false, false};
  const EvolutionResult run = evolve(bump_data(cfg.grid, 1e-3), cfg);
  rep.check("run_completed", !run.series.aborted);
  const RateCheck e = energy_rate_check(run.series, false);
  const RateCheck y = energy_rate_check(run.series, true);
  const SandwichCheck sw = norm_sandwich(run.series);
  rep.kv("E_C_hat", e.c_hat);
  rep.kv("E_max_violation", e.max_violation);
  rep.kv("Y_C_hat", y.c_hat);
  rep.kv("Y_max_violation", y.max_violation);
  rep.kv("sandwich_min_lower", sw.worst_lower);
  rep.kv("sandwich_max_upper", sw.worst_upper);
  rep.check("E rate <= 2 C c0 (E+1)", e.pass(2.0));
  rep.check("Y rate <= 2 C c0 (E+1)", y.pass(2.0));
  rep.check("norm sandwich each cadence", sw.pass());
  return rep.all();
}

// ---- 12 ---------------------------------------------------------------------

bool c12(Report& rep) {
  const double T = 0.25 * kBumpRadius;
  EvolutionConfig cfg = bump_config(32);
  cfg.T = T;
  cfg.k_max = 6;
  cfg.monitors = MonitorSet{false, false, false, false, false};
  const StateField U0 = bump_data(cfg.grid, 1e-4);
  const PicardResult pr = picard_iterate(U0, cfg);
  rep.check("picard_completed", !pr.aborted && int(pr.iterates.size()) == cfg.k_max + 1);
  const double floor = 1e-13 * norm_Y(U0.as_product(), cfg.delta);
  for (const auto& it : pr.iterates)
    rep.kv("iterate_" + std::to_string(it.k), "sup_X = " + std::to_string(it.sup_norm_x) +
                                                 ", sup_diff_Y = " + std::to_string(it.sup_diff_y));
  const auto ratios = pr.ratios();
  for (int k = 2; k <= 5 && k - 2 < int(ratios.size()); ++k) {
    const double prev = pr.iterates[k - 1].sup_diff_y;
    const std::string key = "ratio_k" + std::to_string(k);
    if (prev <= floor) {
      rep.kv(key, "below round-off floor");
      continue;
    }
    rep.kv(key, ratios[k - 2]);
    rep.check(key + " <= 0.5", ratios[k - 2] <= 0.5);
  }

  EvolutionConfig qcfg = cfg;
  const EvolutionResult direct = evolve(U0, qcfg);
  EvolutionConfig fcfg = bump_config(64);
  fcfg.T = T;
  fcfg.monitors = cfg.monitors;
  const EvolutionResult fine = evolve(bump_data(fcfg.grid, 1e-4), fcfg);
  StateField disc = restrict_to(fine.final_state, cfg.grid);
  disc.axpy(-1.0, direct.final_state);
  StateField diff = pr.final_trajectory.back();
  diff.axpy(-1.0, direct.final_state);
  const double dk = norm_Y(diff.as_product(), cfg.delta);
  const double de = norm_Y(disc.as_product(), cfg.delta);
  rep.kv("k6_vs_direct_Y", dk);
  rep.kv("discretization_error_Y", de);
  rep.check("k6 agrees below discretization error", dk < de);
  return rep.all();
}

// ---- 13 ---------------------------------------------------------------------

bool c13(Report& rep) {
  EvolutionConfig cfg = bump_config(32);
  const StateField U0 = bump_data(cfg.grid, 1e-3);
  SliceSpec other;
  other.radius = kBumpRadius;
  other.time_center = {-0.2, 0.1, 0.05};
  other.shift_direction = {-0.3, 1.0, 0.2};
  const StateField direction = initial_state(minkowski_slice(cfg.grid, other));
  const double eps = 1e-6;
  const UniquenessReport u = uniqueness_check(U0, direction, eps, cfg);
  rep.kv("c_hat", u.c_hat);
  rep.kv("final_distance", u.distance.back());
  rep.kv("max_distance_over_eps_exp", u.max_bound_ratio);
  rep.check("identical runs bitwise equal", u.identical_bitwise);
  rep.check("distance <= 10 eps e^{C t}", u.max_bound_ratio <= 10.0);
  return rep.all();
}

}  // namespace

std::vector<int> criterion_ids() {
  std::vector<int> ids;
  for (const auto& [id, s] : table()) ids.push_back(id);
  return ids;
}

std::string criterion_title(int id) {
  const auto it = table().find(id);
  return it == table().end() ? std::string() : it->second.title;
}

double criterion_budget(int id) {
  const auto it = table().find(id);
  return it == table().end() ? 0.0 : it->second.budget;
}

CriterionResult run_criterion(int id, const VerifyOptions& opt) {
  CriterionResult res;
  res.id = id;
  res.title = criterion_title(id);
  res.budget_seconds = criterion_budget(id);
  if (res.title.empty()) throw ConfigError("unknown acceptance criterion " + std::to_string(id));
  if (opt.log) *opt.log << "criterion " << id << ": " << res.title << " ..." << std::endl;
  static const std::map<int, bool (*)(Report&)> fns{
      {1, c1}, {2, c2}, {3, c3}, {4, c4}, {5, c5}, {6, c6}, {7, c7},
      {8, c8}, {9, c9}, {10, c10}, {11, c11}, {12, c12}, {13, c13}};
  Report rep(res);
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = false;
  try {
    ok = fns.at(id)(rep);
  } catch (const std::exception& e) {
    rep.kv("exception", e.what());
    ok = false;
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = res.seconds <= res.budget_seconds;
  if (!in_time) rep.kv("runtime", "over budget");
  res.pass = ok && in_time;
  return res;
}

std::string summary_line(const CriterionResult& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "criterion %2d  %s  %-58s (%.1f s / %.0f s)", r.id,
                r.pass ? "PASS" : "FAIL", r.title.c_str(), r.seconds, r.budget_seconds);
  return buf;
}

}  // namespace hgr::verify
