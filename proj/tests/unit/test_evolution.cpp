#include <doctest.h>

#include <cstring>

#include "helpers.hpp"
#include "hgr/error.hpp"
#include "hgr/evolution.hpp"

using namespace hgr;
using namespace hgr::test;

namespace {

StateField slice_state(const Grid3& g, double amplitude, double radius = 1.0) {
  SliceSpec spec;
  spec.amplitude = amplitude;
  spec.radius = radius;
  return initial_state(minkowski_slice(g, spec));
}

EvolutionConfig quiet_config(const Grid3& g, double T) {
  EvolutionConfig cfg;
  cfg.grid = g;
  cfg.T = T;
  cfg.monitors = MonitorSet{false, false, false, false, false};
  return cfg;
}

bool bitwise_equal(const StateField& a, const StateField& b) {
  for (int i = 0; i < kStateSize; ++i)
    if (std::memcmp(a.comp[i].data(), b.comp[i].data(), a.comp[i].size() * sizeof(double)) != 0)
      return false;
  return true;
}

}  // namespace

TEST_SUITE("evolution") {
  TEST_CASE("flat state is stationary") {
    const Grid3 g(16, 3.0);
    const StateField U = StateField::zeros(g);
    CHECK(rhs(U, U).max_abs() == 0.0);
    CHECK(max_characteristic_speed(U) == doctest::Approx(1.0));
    const EvolutionResult r = evolve(U, quiet_config(g, 0.5));
    CHECK_FALSE(r.series.aborted);
    CHECK(r.final_state.max_abs() == 0.0);
    CHECK(r.final_time == doctest::Approx(0.5));
  }

  TEST_CASE("frozen Minkowski coefficients propagate a plane wave at unit speed") {
    // u_11 = A sin(k (x - t)) solves the flat wave equation
    const Grid3 g(32, 2.0);
    const double k = kPi / g.half_width, A = 1e-3, T = 0.5;
    auto state_at = [&](double t) {
      StateField U = StateField::zeros(g);
      const int c = sym_index(1, 1);
      U.u(c) = ScalarField::from_function(g, [&](double x, double, double) { return A * std::sin(k * (x - t)); });
      U.ut(c) = ScalarField::from_function(g, [&](double x, double, double) { return -A * k * std::cos(k * (x - t)); });
      U.ux(0, c) = ScalarField::from_function(g, [&](double x, double, double) { return A * k * std::cos(k * (x - t)); });
      return U;
    };
    EvolutionConfig cfg = quiet_config(g, T);
    cfg.mode = EvolutionMode::LinearFrozen;
    cfg.check_domain = false;
    const EvolutionResult r = evolve(state_at(0.0), cfg);
    StateField err = r.final_state;
    err.axpy(-1.0, state_at(T));
    CHECK(err.max_abs() < 1e-4 * A);
  }

  TEST_CASE("stepping back with -dt returns to the data") {
    const Grid3 g(32, 6.0);
    const StateField U0 = slice_state(g, 1e-2);
    const double dt = 0.25 * g.spacing();
    StateField U = U0;
    for (int n = 0; n < 8; ++n) U = rk4_step(U, n * dt, dt);
    StateField moved = U;
    moved.axpy(-1.0, U0);
    for (int n = 8; n > 0; --n) U = rk4_step(U, n * dt, -dt);
    StateField back = U;
    back.axpy(-1.0, U0);
    CHECK(back.max_abs() < 1e-3 * moved.max_abs());
  }

  TEST_CASE("identical runs are bitwise equal") {
    const Grid3 g(32, 6.0);
    const StateField U0 = slice_state(g, 1e-3);
    const auto cfg = quiet_config(g, 0.5);
    const EvolutionResult a = evolve(U0, cfg), b = evolve(U0, cfg);
    CHECK(a.steps == b.steps);
    CHECK(bitwise_equal(a.final_state, b.final_state));
  }

  TEST_CASE("CFL and domain-of-dependence preconditions") {
    const Grid3 g(32, 6.0);
    const StateField U0 = slice_state(g, 1e-3);
    auto cfg = quiet_config(g, 0.5);
    cfg.cfl = 0.6;
    CHECK_THROWS_AS(choose_dt(U0, cfg), PreconditionError);
    cfg.cfl = 0.25;
    cfg.dt = g.spacing();
    CHECK_THROWS_AS(choose_dt(U0, cfg), PreconditionError);
    cfg.dt = 0.0;
    cfg.T = 3.0;
    CHECK_THROWS_AS(evolve(U0, cfg), PreconditionError);
    cfg.T = 0.5;
    CHECK(choose_dt(U0, cfg) == doctest::Approx(0.25 * g.spacing() / max_characteristic_speed(U0)));
  }

  TEST_CASE("support radius of compact data") {
    const Grid3 g(32, 6.0);
    const double rs = support_radius(slice_state(g, 1e-3, 1.0), 1e-10);
    CHECK(rs > 0.5);
    CHECK(rs < 2.0);
    CHECK(support_radius(StateField::zeros(g), 1e-10) == 0.0);
  }

  TEST_CASE("gauge source stays small on slice data") {
    const Grid3 g(32, 6.0);
    auto cfg = quiet_config(g, 0.5);
    cfg.monitors.gauge = true;
    cfg.cadence = 4;
    const EvolutionResult r = evolve(slice_state(g, 1e-3), cfg);
    REQUIRE(r.series.records.size() >= 2);
    const double f0 = std::max(r.series.records.front().max_F, 1e-14);
    for (const auto& rec : r.series.records) CHECK(rec.max_F <= 10 * std::max(f0, 0.5 * rec.max_dtF));
  }

  TEST_CASE("energy rate check on a synthetic series") {
    MonitorSeries s;
    const double E[] = {0.0, 1.0, 3.0, 3.5};
    for (int i = 0; i < 4; ++i) {
      MonitorRecord r;
      r.t = i;
      r.energy = E[i];
      r.c0 = 1.0;
      s.records.push_back(r);
    }
    const RateCheck rc = energy_rate_check(s);
    CHECK(rc.c_hat == doctest::Approx(1.0));
    // second interval: rate 2 against bound 1 * 1 * (1 + 1)
    CHECK(rc.max_violation == doctest::Approx(1.0));
    CHECK(rc.pass());
  }

  TEST_CASE("norm sandwich on a synthetic series") {
    MonitorSeries s;
    MonitorRecord r;
    r.norm_x = 2.0;
    r.c0 = 4.0;
    r.norm_xa0 = 2.0;
    s.records.push_back(r);
    const SandwichCheck sc = norm_sandwich(s);
    CHECK(sc.worst_lower == doctest::Approx(2.0));
    CHECK(sc.worst_upper == doctest::Approx(0.5));
    CHECK(sc.pass());
  }

  TEST_CASE("restriction samples the coarse points") {
    const Grid3 fine(16, 2.0), coarse(8, 2.0);
    StateField U = StateField::zeros(fine);
    U.u(0) = ScalarField::from_function(fine, [](double x, double y, double z) { return x + 2 * y - z; });
    const StateField R = restrict_to(U, coarse);
    for (std::size_t i = 0; i < coarse.size(); i += 5) {
      const auto p = coarse.position(i);
      CHECK(R.u(0)[i] == doctest::Approx(p[0] + 2 * p[1] - p[2]));
    }
  }

  TEST_CASE("monitor CSV has the documented header") {
    MonitorSeries s;
    s.records.push_back(MonitorRecord{});
    const std::string csv = s.to_csv();
    CHECK(csv.rfind("step,t,energy", 0) == 0);
    CHECK(MonitorSeries::csv_columns().size() == 13);
  }

  TEST_CASE("mode names round trip") {
    for (auto m : {EvolutionMode::Quasilinear, EvolutionMode::LinearFrozen, EvolutionMode::Picard})
      CHECK(parse_mode(to_string(m)) == m);
    CHECK_THROWS(parse_mode("bogus"));
  }
}

TEST_SUITE("picard") {
  TEST_CASE("flat data gives identical iterates") {
    const Grid3 g(16, 3.0);
    auto cfg = quiet_config(g, 0.25);
    cfg.k_max = 2;
    const PicardResult r = picard_iterate(StateField::zeros(g), cfg);
    CHECK_FALSE(r.aborted);
    REQUIRE(r.iterates.size() == 3);
    for (const auto& it : r.iterates) CHECK(it.sup_diff_y == 0.0);
  }

  TEST_CASE("iterates contract towards the quasilinear solution") {
    const Grid3 g(32, 6.0);
    auto cfg = quiet_config(g, 0.25);
    cfg.k_max = 4;
    const StateField U0 = slice_state(g, 1e-3);
    // the fixed point differs from the direct solve by the O(dt^2) coefficient interpolation
    auto gap = [&](double dt) {
      cfg.dt = dt;
      const PicardResult r = picard_iterate(U0, cfg);
      CHECK_FALSE(r.aborted);
      REQUIRE(r.iterates.size() == 5);
      for (int k = 2; k <= 4; ++k) CHECK(r.iterates[k].sup_diff_y < 0.5 * r.iterates[k - 1].sup_diff_y);
      StateField d = r.final_trajectory.back();
      d.axpy(-1.0, evolve(U0, cfg).final_state);
      return d.max_abs();
    };
    const double dt = choose_dt(U0, cfg);
    const double coarse = gap(dt), fine = gap(dt / 2);
    CHECK(coarse < 1e-3 * U0.max_abs());
    CHECK(coarse / fine > 3.0);
  }
}
