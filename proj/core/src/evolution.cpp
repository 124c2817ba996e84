#include "hgr/evolution.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "hgr/error.hpp"
#include "hgr/finite_difference.hpp"
#include "hgr/snapshot.hpp"

namespace hgr {
namespace {

constexpr double kKO[7] = {1.0, -6.0, 15.0, -20.0, 15.0, -6.0, 1.0};

struct CoeffPoint {
  Mat4 ginv;
  double gt[4][4];  // tilde-g
  bool ok = true;
};

CoeffPoint coefficients_at(const StateField& V, std::size_t idx) {
  CoeffPoint c;
  const Mat4 g = V.metric_at(idx);
  double det = 0.0;
  c.ginv = invert4(g, &det);
  if (!(std::abs(det) > 1e-10) || !(c.ginv[0][0] < 0.0)) {
    c.ok = false;
    return c;
  }
  const double s = 1.0 / (-c.ginv[0][0]);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) c.gt[a][b] = s * c.ginv[a][b];
  return c;
}

void throw_signature(const Grid3& grid, long long bad) {
  const auto x = grid.position(std::size_t(bad));
  std::ostringstream os;
  os << "signature lost at (" << x[0] << ", " << x[1] << ", " << x[2] << ")";
  throw NumericError(os.str());
}

}  // namespace

std::string to_string(EvolutionMode m) {
  switch (m) {
    case EvolutionMode::Quasilinear:
      return "quasilinear";
    case EvolutionMode::LinearFrozen:
      return "linear-frozen";
    case EvolutionMode::Picard:
      return "picard";
  }
  return "?";
}

EvolutionMode parse_mode(const std::string& s) {
  if (s == "quasilinear") return EvolutionMode::Quasilinear;
  if (s == "linear-frozen") return EvolutionMode::LinearFrozen;
  if (s == "picard") return EvolutionMode::Picard;
  throw ConfigError("unknown mode '" + s + "' (quasilinear | linear-frozen | picard)");
}

double max_characteristic_speed(const StateField& U) {
  const Grid3& grid = U.grid();
  double vmax = 0.0;
  const long long n = static_cast<long long>(grid.size());
  long long bad = n;
#pragma omp parallel for schedule(static) reduction(max : vmax) reduction(min : bad)
  for (long long idx = 0; idx < n; ++idx) {
    const CoeffPoint c = coefficients_at(U, idx);
    if (!c.ok) {
      bad = std::min(bad, idx);
      continue;
    }
    for (int a = 1; a < 4; ++a) {
      const double b = c.gt[0][a];
      const double disc = b * b + c.gt[a][a];
      if (disc < 0.0) {
        bad = std::min(bad, idx);
        continue;
      }
      vmax = std::max(vmax, std::abs(b) + std::sqrt(disc));
    }
  }
  if (bad < n) throw_signature(grid, bad);
  return vmax;
}

double support_radius(const StateField& U, double rel_tol) {
  const double m = U.max_abs();
  if (m == 0.0) return 0.0;
  const Grid3& g = U.grid();
  double r = 0.0;
  for (const auto& f : U.comp)
    for (std::size_t idx = 0; idx < g.size(); ++idx)
      if (std::abs(f[idx]) > rel_tol * m) r = std::max(r, g.radius(idx));
  return r;
}

StateField rhs(const StateField& U, const StateField& V, double dissipation) {
  const Grid3& grid = U.grid();
  require_same_grid(V.grid(), grid, "rhs");
  StateField out = StateField::zeros(grid);
  const double h = grid.spacing();
  const bool quasilinear = &U == &V;
  const long long n = static_cast<long long>(grid.size());
  long long bad = n;
#pragma omp parallel for schedule(static) reduction(min : bad)
  for (long long lidx = 0; lidx < n; ++lidx) {
    const std::size_t idx = std::size_t(lidx);
    const CoeffPoint c = coefficients_at(V, idx);
    Eigen::Matrix3d G;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) G(a, b) = c.ok ? c.gt[a + 1][b + 1] : 0.0;
    const Eigen::LLT<Eigen::Matrix3d> llt(G);
    if (!c.ok || llt.info() != Eigen::Success) {
      bad = std::min(bad, lidx);
      continue;
    }
    const Neighbors nb(grid, idx);
    const Deriv1 xu = U.derivatives_at(idx);
    const Mat4 q = quasilinear ? reduced_Q_point(c.ginv, xu)
                               : reduced_Q_bilinear(c.ginv, xu, V.derivatives_at(idx));
    const double qscale = 1.0 / (-c.ginv[0][0]);
    for (int comp = 0; comp < kN; ++comp) {
      const auto [p, r] = sym_pair(comp);
      out.u(comp)[idx] = U.ut(comp)[idx];
      double dut[3];
      for (int a = 0; a < 3; ++a) dut[a] = d1(U.ut(comp).data(), nb, a, h);
      double row2 = -qscale * q[p][r];
      for (int a = 0; a < 3; ++a) {
        row2 += 2.0 * c.gt[0][a + 1] * dut[a];
        for (int b = 0; b < 3; ++b) {
          const double g_ab = c.gt[a + 1][b + 1];
          if (g_ab != 0.0) row2 += g_ab * d1(U.ux(b, comp).data(), nb, a, h);
        }
      }
      out.ut(comp)[idx] = row2;
      // tilde-g^{ab} d_t ux_b = tilde-g^{ab} d_a ut
      Eigen::Vector3d r3 = G * Eigen::Vector3d(dut[0], dut[1], dut[2]);
      const Eigen::Vector3d sol = llt.solve(r3);
      for (int b = 0; b < 3; ++b) out.ux(b, comp)[idx] = sol[b];
    }
    if (dissipation > 0.0) {
      const double w = dissipation / (64.0 * h);
      for (int i = 0; i < kStateSize; ++i) {
        const double* f = U.comp[i].data();
        double s = 0.0;
        for (int a = 0; a < 3; ++a)
          for (int o = -3; o <= 3; ++o) s += kKO[o + 3] * f[nb.at(a, o)];
        out.comp[i][idx] += w * s;
      }
    }
  }
  if (bad < n) throw_signature(grid, bad);
  return out;
}

StateField rk4_step(const StateField& U, double t, double dt, const CoefficientTrack* coeff,
                    double dissipation) {
  StateField scratch;
  auto stage = [&](const StateField& X, double time) {
    if (!coeff) return rhs(X, X, dissipation);
    return rhs(X, (*coeff)(time, scratch), dissipation);
  };
  const StateField k1 = stage(U, t);
  StateField tmp = U;
  tmp.axpy(0.5 * dt, k1);
  const StateField k2 = stage(tmp, t + 0.5 * dt);
  tmp = U;
  tmp.axpy(0.5 * dt, k2);
  const StateField k3 = stage(tmp, t + 0.5 * dt);
  tmp = U;
  tmp.axpy(dt, k3);
  const StateField k4 = stage(tmp, t + dt);
  StateField out = U;
  out.axpy(dt / 6.0, k1);
  out.axpy(dt / 3.0, k2);
  out.axpy(dt / 3.0, k3);
  out.axpy(dt / 6.0, k4);
  if (!out.is_finite()) throw NumericError("rk4_step: non-finite state");
  return out;
}

// ---- monitors ---------------------------------------------------------------

double energy(const StateField& U, const DyadicPartition& p, double s, double delta,
              const SupportPolicy& policy) {
  const ProductState P = U.as_product();
  return 0.5 * inner_X_A0(P, P, a33_from_state(U), p, s, delta, policy);
}

namespace {

// 4D second derivatives from the state and its time derivative.
Deriv2 second_derivatives(const StateField& U, const StateField& dUdt, const Neighbors& nb,
                          std::size_t idx, double h) {
  Deriv2 dd{};
  for (int c = 0; c < kN; ++c) {
    const auto [p, q] = sym_pair(c);
    auto set = [&](int i, int j, double v) {
      dd[i][j][p][q] = dd[i][j][q][p] = v;
      dd[j][i][p][q] = dd[j][i][q][p] = v;
    };
    set(0, 0, dUdt.ut(c)[idx]);
    for (int a = 0; a < 3; ++a) {
      set(0, a + 1, d1(U.ut(c).data(), nb, a, h));
      for (int b = a; b < 3; ++b) {
        const double v = 0.5 * (d1(U.ux(b, c).data(), nb, a, h) + d1(U.ux(a, c).data(), nb, b, h));
        set(a + 1, b + 1, v);
      }
    }
  }
  return dd;
}

// (h, K) on the slice: N = (-g^00)^{-1/2}, N_a = g_0a,
// K_ab = -(d_t g_ab - D_a N_b - D_b N_a) / (2N).
ADMData adm_from_state(const StateField& U) {
  const Grid3& grid = U.grid();
  ADMData d = ADMData::flat(grid);
  const long long n = static_cast<long long>(grid.size());
#pragma omp parallel for schedule(static)
  for (long long lidx = 0; lidx < n; ++lidx) {
    const std::size_t idx = std::size_t(lidx);
    const Mat4 g = U.metric_at(idx);
    const Mat4 ginv = invert4(g);
    const Deriv1 x = U.derivatives_at(idx);
    const double lapse = 1.0 / std::sqrt(-ginv[0][0]);
    Eigen::Matrix3d h;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) h(a, b) = g[a + 1][b + 1];
    const Eigen::Matrix3d hinv = h.inverse();
    for (int a = 0; a < 3; ++a)
      for (int b = a; b < 3; ++b) {
        double DaNb = x[a + 1][0][b + 1], DbNa = x[b + 1][0][a + 1];
        for (int c = 0; c < 3; ++c) {
          double gam = 0.0;  // Gamma^c_ab of h
          for (int e = 0; e < 3; ++e)
            gam += hinv(c, e) * 0.5 *
                   (x[a + 1][e + 1][b + 1] + x[b + 1][e + 1][a + 1] - x[e + 1][a + 1][b + 1]);
          DaNb -= gam * g[0][c + 1];
        }
        DbNa = DaNb + (DbNa - x[a + 1][0][b + 1]);  // Gamma symmetric in ab
        const int q = sym3_index(a, b);
        d.h[q][idx] = g[a + 1][b + 1];
        d.K[q][idx] = -(x[0][a + 1][b + 1] - DaNb - DbNa) / (2.0 * lapse);
      }
  }
  return d;
}

}  // namespace

MonitorRecord compute_monitors(const StateField& U, const DyadicPartition& p,
                               const EvolutionConfig& cfg, const StateField* dUdt) {
  MonitorRecord rec;
  rec.max_U = U.max_abs();
  const MonitorSet& m = cfg.monitors;
  // Evolved fields carry small finite-difference tails beyond the exact
  // domain of dependence; the margin is enforced on the data in choose_dt.
  SupportPolicy policy = cfg.support;
  policy.enforce = false;
  if (m.energy || m.y_energy) {
    const A33Field a33 = a33_from_state(U);
    rec.c0 = a33_c0(a33);
    const ProductState P = U.as_product();
    if (m.energy) {
      rec.norm_x = norm_X(P, p, cfg.s, cfg.delta, policy);
      const double xa0 = inner_X_A0(P, P, a33, p, cfg.s, cfg.delta, policy);
      rec.norm_xa0 = std::sqrt(std::max(xa0, 0.0));
      rec.energy = 0.5 * xa0;
    }
    if (m.y_energy) rec.y_energy = inner_Y_a33(P, P, a33, cfg.delta);
  }
  if (m.gauge || m.ricci) {
    StateField local;
    if (!dUdt) {
      local = rhs(U, U, 0.0);
      dUdt = &local;
    }
    const Grid3& grid = U.grid();
    const double h = grid.spacing();
    const long long n = static_cast<long long>(grid.size());
    double mf = 0.0, mdf = 0.0, mr = 0.0;
#pragma omp parallel for schedule(static) reduction(max : mf, mdf, mr)
    for (long long lidx = 0; lidx < n; ++lidx) {
      const std::size_t idx = std::size_t(lidx);
      const Neighbors nb(grid, idx);
      const Mat4 ginv = invert4(U.metric_at(idx));
      const Deriv1 x = U.derivatives_at(idx);
      const Deriv2 dd = second_derivatives(U, *dUdt, nb, idx, h);
      if (m.gauge) {
        const auto f = gauge_F_point(ginv, x);
        const auto df = gauge_F_gradient_point(ginv, x, dd);
        for (int mu = 0; mu < 4; ++mu) {
          mf = std::max(mf, std::abs(f[mu]));
          mdf = std::max(mdf, std::abs(df[0][mu]));
        }
      }
      if (m.ricci) {
        const Mat4 r = ricci_point(ginv, x, dd);
        for (int a = 0; a < 4; ++a)
          for (int b = 0; b < 4; ++b) mr = std::max(mr, std::abs(r[a][b]));
      }
    }
    rec.max_F = mf;
    rec.max_dtF = mdf;
    rec.max_R = mr;
  }
  if (m.constraints) {
    const ADMData d = adm_from_state(U);
    rec.max_H = hamiltonian_residual(d, 4).max_abs();
    for (const auto& f : momentum_residual(d, 4)) rec.max_M = std::max(rec.max_M, f.max_abs());
  }
  return rec;
}

const std::vector<std::string>& MonitorSeries::csv_columns() {
  static const std::vector<std::string> cols{"step",  "t",     "energy", "y_energy", "norm_x",
                                             "norm_xa0", "c0", "max_F",  "max_dtF",  "max_H",
                                             "max_M", "max_R", "max_U"};
  return cols;
}

std::string MonitorSeries::to_csv() const {
  std::ostringstream os;
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << "\n" << std::setprecision(17);
  for (const auto& r : records) {
    os << r.step << ',' << r.t << ',' << r.energy << ',' << r.y_energy << ',' << r.norm_x << ','
       << r.norm_xa0 << ',' << r.c0 << ',' << r.max_F << ',' << r.max_dtF << ',' << r.max_H << ','
       << r.max_M << ',' << r.max_R << ',' << r.max_U << "\n";
  }
  return os.str();
}

void MonitorSeries::write_csv(const std::filesystem::path& path) const {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path.string());
  os << to_csv();
}

// ---- driver -----------------------------------------------------------------

double choose_dt(const StateField& U0, const EvolutionConfig& cfg) {
  if (!(cfg.cfl > 0.0) || cfg.cfl > 0.5) throw PreconditionError("cfl must lie in (0, 0.5]");
  if (!(cfg.T >= 0.0)) throw PreconditionError("T must be nonnegative");
  require_same_grid(U0.grid(), cfg.grid, "evolve");
  const double speed = std::max(max_characteristic_speed(U0), 1e-12);
  const double limit = cfg.cfl * cfg.grid.spacing() / speed;
  double dt = cfg.dt > 0.0 ? cfg.dt : limit;
  if (dt > limit * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "CFL violation: dt = " << dt << " exceeds cfl * dx / speed = " << limit;
    throw PreconditionError(os.str());
  }
  if (cfg.check_domain && U0.max_abs() > 0.0) {
    const double rs = support_radius(U0, cfg.support.rel_tol);
    const double reach = rs + speed * cfg.T;
    const double allowed = cfg.grid.half_width - cfg.support.margin_cells * cfg.grid.spacing();
    if (reach > allowed + 1e-12) {
      std::ostringstream os;
      os << "domain of dependence: support radius " << rs << " plus speed * T = " << speed * cfg.T
         << " exceeds " << allowed << " (box half-width minus margin)";
      throw PreconditionError(os.str());
    }
  }
  return dt;
}

EvolutionResult evolve(const StateField& U0, const EvolutionConfig& cfg, const EvolveOptions& opt) {
  if (cfg.cadence < 1) throw PreconditionError("cadence must be >= 1");
  EvolutionResult res;
  const double dt_max = choose_dt(U0, cfg);
  const int steps = cfg.T > 0.0 ? int(std::ceil(cfg.T / dt_max - 1e-9)) : 0;
  const double dt = steps > 0 ? cfg.T / steps : 0.0;
  res.dt = dt;

  const bool spectral = cfg.monitors.energy;
  DyadicPartition part;
  if (spectral) part = build_partition(cfg.grid, default_j_max(cfg.grid));

  StateField frozen_zero;
  CoefficientTrack frozen_track;
  const CoefficientTrack* track = opt.track;
  if (!track && cfg.mode == EvolutionMode::LinearFrozen) {
    const StateField* f = opt.frozen;
    if (!f) {
      frozen_zero = StateField::zeros(cfg.grid);
      f = &frozen_zero;
    }
    frozen_track = [f](double, StateField&) -> const StateField& { return *f; };
    track = &frozen_track;
  }
  if (cfg.mode == EvolutionMode::Picard && !track) {
    throw PreconditionError("evolve: picard mode needs a coefficient track (use picard_iterate)");
  }

  auto record = [&](const StateField& U, int step, double t) {
    MonitorRecord r = compute_monitors(U, part, cfg);
    r.step = step;
    r.t = t;
    res.series.records.push_back(r);
    if (opt.on_record) opt.on_record(r);
  };

  StateField U = U0;
  double t = 0.0;
  if (opt.keep_trajectory) res.trajectory.push_back(U);
  try {
    record(U, 0, t);
    for (int n = 0; n < steps; ++n) {
      const double speed = max_characteristic_speed(U);
      if (speed * dt / cfg.grid.spacing() > 0.5) throw NumericError("CFL bound 0.5 exceeded during the run");
      StateField next = rk4_step(U, t, dt, track, cfg.dissipation);
      U = std::move(next);
      t = (n + 1) * dt;
      res.series.last_good_time = t;
      if (opt.keep_trajectory) res.trajectory.push_back(U);
      if ((n + 1) % cfg.cadence == 0 || n + 1 == steps) record(U, n + 1, t);
    }
  } catch (const NumericError& e) {
    res.series.aborted = true;
    res.series.abort_reason = e.what();
  }
  res.final_state = U;
  res.final_time = res.series.last_good_time;
  res.steps = int(std::lround(res.final_time / (dt > 0 ? dt : 1.0)));
  if (opt.checkpoint) {
    Snapshot snap;
    snap.grid = cfg.grid;
    snap.time = res.final_time;
    for (int i = 0; i < kStateSize; ++i) {
      snap.names.push_back("U" + std::to_string(i));
      snap.fields.push_back(U.comp[i]);
    }
    write_snapshot(*opt.checkpoint, snap);
  }
  return res;
}

// ---- checks -----------------------------------------------------------------

RateCheck energy_rate_check(const MonitorSeries& series, bool use_y_energy) {
  RateCheck rc;
  const auto& r = series.records;
  if (r.size() < 2) return rc;
  auto E = [&](std::size_t i) { return use_y_energy ? r[i].y_energy : r[i].energy; };
  auto rate = [&](std::size_t i) { return (E(i + 1) - E(i)) / (r[i + 1].t - r[i].t); };
  rc.c_hat = std::abs(rate(0)) / (r[0].c0 * (E(0) + 1.0));
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    const double bound = rc.c_hat * r[i].c0 * (E(i) + 1.0);
    const double rt = rate(i);
    double v;
    if (bound > 0.0) v = rt / bound;
    else v = rt > 0.0 ? INFINITY : 0.0;
    if (v > rc.max_violation || rc.worst_interval < 0) {
      rc.max_violation = std::max(rc.max_violation, v);
      if (v >= rc.max_violation) rc.worst_interval = int(i);
    }
  }
  return rc;
}

SandwichCheck norm_sandwich(const MonitorSeries& series) {
  SandwichCheck sc{INFINITY, 0.0};
  bool any = false;
  for (const auto& r : series.records) {
    if (r.norm_x == 0.0) continue;
    any = true;
    const double q = std::sqrt(r.c0);
    sc.worst_lower = std::min(sc.worst_lower, r.norm_xa0 * q / r.norm_x);
    sc.worst_upper = std::max(sc.worst_upper, r.norm_xa0 / (q * r.norm_x));
  }
  if (!any) sc = {1.0, 1.0};
  return sc;
}

StateField restrict_to(const StateField& fine, const Grid3& coarse) {
  const Grid3& fg = fine.grid();
  if (fg.half_width != coarse.half_width || fg.n % coarse.n != 0) {
    throw PreconditionError("restrict_to: grids are not nested refinements of one box");
  }
  const int r = fg.n / coarse.n;
  StateField out = StateField::zeros(coarse);
  for (int c = 0; c < kStateSize; ++c)
    for (int i = 0; i < coarse.n; ++i)
      for (int j = 0; j < coarse.n; ++j)
        for (int k = 0; k < coarse.n; ++k) out.comp[c].at(i, j, k) = fine.comp[c].at(r * i, r * j, r * k);
  return out;
}

// ---- data -------------------------------------------------------------------

namespace {

struct Bump {
  double v = 0.0;
  std::array<double, 3> d{};
  std::array<std::array<double, 3>, 3> dd{};
};

// b = (1 - |y|^2/R^2)^p with analytic first and second derivatives.
Bump bump(const std::array<double, 3>& y, double R, int power) {
  Bump b;
  const double R2 = R * R;
  const double w = 1.0 - (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]) / R2;
  if (w <= 0.0) return b;
  const double p = power;
  b.v = std::pow(w, p);
  const double c1 = p * std::pow(w, p - 1);
  const double c2 = p * (p - 1) * std::pow(w, p - 2);
  for (int i = 0; i < 3; ++i) {
    const double wi = -2.0 * y[i] / R2;
    b.d[i] = c1 * wi;
    for (int j = 0; j < 3; ++j) {
      const double wj = -2.0 * y[j] / R2;
      b.dd[i][j] = c2 * wi * wj + c1 * (i == j ? -2.0 / R2 : 0.0);
    }
  }
  return b;
}

}  // namespace

ADMData minkowski_slice(const Grid3& grid, const SliceSpec& spec) {
  ADMData d = ADMData::flat(grid);
  const double at = spec.amplitude * spec.time_weight;
  const double ax = spec.amplitude * spec.shift_weight;
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    const auto x = grid.position(idx);
    std::array<double, 3> yt, yx;
    for (int i = 0; i < 3; ++i) {
      yt[i] = x[i] - spec.time_center[i];
      yx[i] = x[i] - spec.shift_center[i];
    }
    const Bump bt = bump(yt, spec.radius, spec.power);
    const Bump bx = bump(yx, spec.radius, spec.power);
    // J_ka = delta_ka + d_a xi_k
    Eigen::Matrix3d J = Eigen::Matrix3d::Identity();
    for (int k = 0; k < 3; ++k)
      for (int a = 0; a < 3; ++a) J(k, a) += ax * spec.shift_direction[k] * bx.d[a];
    Eigen::Vector3d dtau;
    for (int a = 0; a < 3; ++a) dtau[a] = at * bt.d[a];
    const Eigen::Matrix3d h = J.transpose() * J - dtau * dtau.transpose();
    // Spatial part of the unit normal covector n = n0 (1, -m), J^T m = grad tau.
    const Eigen::Vector3d m = J.transpose().colPivHouseholderQr().solve(dtau);
    const double n0 = 1.0 / std::sqrt(1.0 - m.squaredNorm());
    double mv = 0.0;
    for (int k = 0; k < 3; ++k) mv += m[k] * spec.shift_direction[k];
    for (int a = 0; a < 3; ++a)
      for (int b = a; b < 3; ++b) {
        const int q = sym3_index(a, b);
        d.h[q][idx] = h(a, b);
        d.K[q][idx] = -n0 * (at * bt.dd[a][b] - mv * ax * bx.dd[a][b]);
      }
  }
  return d;
}

StateField initial_state(const ADMData& d) {
  const CauchyData c = assemble_cauchy_data(d);
  return to_first_order(c.g, c.gt);
}

}  // namespace hgr
