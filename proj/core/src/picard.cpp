#include <cmath>
#include <cstring>
#include <sstream>

#include "hgr/error.hpp"
#include "hgr/evolution.hpp"

namespace hgr {
namespace {

// Piecewise-linear interpolation of a per-step trajectory.
struct TrajectoryTrack {
  const std::vector<StateField>* traj;
  double dt;

  const StateField& operator()(double t, StateField& scratch) const {
    const auto& tr = *traj;
    const double x = t / dt;
    const long i = std::lround(x);
    if (std::abs(x - double(i)) < 1e-9 && i >= 0 && std::size_t(i) < tr.size()) return tr[i];
    std::size_t lo = std::size_t(std::max(0.0, std::floor(x)));
    if (lo + 1 >= tr.size()) return tr.back();
    const double w = x - double(lo);
    scratch = tr[lo];
    scratch *= 1.0 - w;
    scratch.axpy(w, tr[lo + 1]);
    return scratch;
  }
};

double state_y_norm(const StateField& U, double delta) { return norm_Y(U.as_product(), delta); }

double y_a33_norm(const StateField& W, const StateField& coeff, double delta) {
  const ProductState P = W.as_product();
  return std::sqrt(std::max(0.0, inner_Y_a33(P, P, a33_from_state(coeff), delta)));
}

StateField difference(const StateField& a, const StateField& b) {
  StateField d = a;
  d.axpy(-1.0, b);
  return d;
}

bool bitwise_equal(const StateField& a, const StateField& b) {
  for (int c = 0; c < kStateSize; ++c)
    if (std::memcmp(a.comp[c].data(), b.comp[c].data(), a.comp[c].size() * sizeof(double)) != 0)
      return false;
  return true;
}

}  // namespace

std::vector<double> PicardResult::ratios() const {
  std::vector<double> r;
  for (std::size_t k = 2; k < iterates.size(); ++k) {
    const double prev = iterates[k - 1].sup_diff_y;
    r.push_back(prev > 0.0 ? iterates[k].sup_diff_y / prev : 0.0);
  }
  return r;
}

PicardResult picard_iterate(const StateField& U0, const EvolutionConfig& cfg) {
  if (cfg.k_max < 1) throw PreconditionError("k_max must be >= 1");
  PicardResult res;
  const double dt_max = choose_dt(U0, cfg);
  const int steps = cfg.T > 0.0 ? int(std::ceil(cfg.T / dt_max - 1e-9)) : 0;
  const double dt = steps > 0 ? cfg.T / steps : 0.0;
  res.dt = dt;

  const std::size_t state_bytes = U0.grid().size() * kStateSize * sizeof(double);
  const std::size_t need = 2 * std::size_t(steps + 1) * state_bytes;
  if (need > cfg.max_history_bytes) {
    std::ostringstream os;
    os << "picard: two trajectories need " << need << " bytes, above the limit of "
       << cfg.max_history_bytes;
    throw PreconditionError(os.str());
  }

  const DyadicPartition part = build_partition(cfg.grid, default_j_max(cfg.grid));
  for (int n = 0; n <= steps; ++n) res.times.push_back(n * dt);

  // U^0(t) = U0 for all t.
  std::vector<StateField> prev(std::size_t(steps + 1), U0);
  SupportPolicy policy = cfg.support;
  policy.enforce = false;
  const double x0 = norm_X(U0.as_product(), part, cfg.s, cfg.delta, policy);
  const double scale = std::max(x0, 1e-300);
  {
    PicardIterate it;
    it.k = 0;
    it.sup_norm_x = x0;
    res.iterates.push_back(it);
  }

  EvolutionConfig mcfg = cfg;
  mcfg.monitors = MonitorSet{true, false, false, false, false};

  for (int k = 1; k <= cfg.k_max; ++k) {
    PicardIterate it;
    it.k = k;
    std::vector<StateField> cur;
    cur.reserve(prev.size());
    cur.push_back(U0);
    const TrajectoryTrack tt{&prev, dt};
    const CoefficientTrack track = [&tt](double t, StateField& s) -> const StateField& { return tt(t, s); };
    try {
      for (int n = 0; n < steps; ++n) cur.push_back(rk4_step(cur.back(), n * dt, dt, &track, cfg.dissipation));
    } catch (const NumericError& e) {
      res.aborted = true;
      res.abort_reason = "iterate " + std::to_string(k) + ": " + e.what();
      break;
    }
    for (int n = 0; n <= steps; ++n) {
      it.sup_diff_y = std::max(it.sup_diff_y, state_y_norm(difference(cur[n], prev[n]), cfg.delta));
      if (n % cfg.cadence == 0 || n == steps) {
        MonitorRecord r = compute_monitors(cur[n], part, mcfg);
        r.step = n;
        r.t = n * dt;
        it.series.records.push_back(r);
        it.sup_norm_x = std::max(it.sup_norm_x, r.norm_x);
      }
    }
    res.iterates.push_back(it);
    prev = std::move(cur);
    if (!(it.sup_norm_x <= cfg.divergence_factor * scale)) {
      res.aborted = true;
      std::ostringstream os;
      os << "iterate " << k << " diverged: sup ||U^k||_X = " << it.sup_norm_x << " exceeds "
         << cfg.divergence_factor << " x ||U0||_X";
      res.abort_reason = os.str();
      break;
    }
  }
  res.final_trajectory = std::move(prev);
  return res;
}

UniquenessReport uniqueness_check(const StateField& U0, const StateField& direction, double epsilon,
                                  const EvolutionConfig& cfg) {
  if (!(epsilon > 0.0)) throw PreconditionError("epsilon must be positive");
  UniquenessReport rep;
  rep.epsilon = epsilon;
  const double dn = y_a33_norm(direction, U0, cfg.delta);
  if (!(dn > 0.0)) throw PreconditionError("perturbation direction has zero norm");
  StateField Ue = U0;
  Ue.axpy(epsilon / dn, direction);

  const double dt_max = std::min(choose_dt(U0, cfg), choose_dt(Ue, cfg));
  const int steps = cfg.T > 0.0 ? int(std::ceil(cfg.T / dt_max - 1e-9)) : 0;
  const double dt = steps > 0 ? cfg.T / steps : 0.0;

  StateField A = U0, B = U0, E = Ue;
  auto record = [&](double t) {
    rep.times.push_back(t);
    rep.distance.push_back(y_a33_norm(difference(E, A), A, cfg.delta));
  };
  record(0.0);
  rep.identical_bitwise = true;
  for (int n = 0; n < steps; ++n) {
    const double t = n * dt;
    A = rk4_step(A, t, dt, nullptr, cfg.dissipation);
    B = rk4_step(B, t, dt, nullptr, cfg.dissipation);
    E = rk4_step(E, t, dt, nullptr, cfg.dissipation);
    rep.identical_bitwise = rep.identical_bitwise && bitwise_equal(A, B);
    if ((n + 1) % cfg.cadence == 0 || n + 1 == steps) record((n + 1) * dt);
  }
  if (rep.times.size() >= 2 && rep.distance[0] > 0.0 && rep.distance[1] > 0.0) {
    rep.c_hat = std::max(0.0, std::log(rep.distance[1] / rep.distance[0]) / rep.times[1]);
  }
  for (std::size_t i = 0; i < rep.times.size(); ++i) {
    const double bound = epsilon * std::exp(rep.c_hat * rep.times[i]);
    rep.max_bound_ratio = std::max(rep.max_bound_ratio, rep.distance[i] / bound);
  }
  return rep;
}

}  // namespace hgr
