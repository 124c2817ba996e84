// hgr: command-line driver for norms, structure checks, constraint solves,
// evolutions, Picard iterations and the acceptance suite.

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Core>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "acceptance.hpp"
#include "hgr/constraints.hpp"
#include "hgr/error.hpp"
#include "hgr/evolution.hpp"
#include "hgr/parallel.hpp"
#include "hgr/snapshot.hpp"
#include "hgr/spectral.hpp"

#ifndef HGR_VERSION
#define HGR_VERSION "0"
#endif

namespace fs = std::filesystem;
using namespace hgr;

namespace {

enum Exit { kOk = 0, kConfig = 2, kPrecondition = 3, kNumeric = 4, kAcceptance = 5 };

struct AcceptanceFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config;
  int grid = 32;
  double box = 6.0;
  double s = 1.6;
  double delta = -1.0;
  double gamma = 1.0;
  double dt = 0.0;
  double T = 1.0;
  double cfl = 0.25;
  std::string mode = "quasilinear";
  std::string out = "hgr-out";
  std::string resume;

  // data
  std::string input;
  std::string data = "slice";
  double amplitude = 1e-3;
  double bump_radius = 1.0;

  // norm
  int m = 0;
  double beta = 0.0;

  // solve-constraints
  std::string seed = "gaussian-tt";
  double seed_radius = 1.5;
  int seed_power = 8;
  double mass = 0.0;
  double excision = 0.5;
  bool two_grids = true;

  // evolve / picard
  int cadence = 1;
  double dissipation = 0.0;
  int k_max = 6;

  // verify-all
  std::vector<int> only;
};

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  char b[17];
  std::snprintf(b, sizeof b, "%016llx", static_cast<unsigned long long>(v));
  return b;
}

Grid3 grid_of(const Options& o) {
  try {
    return Grid3(o.grid, o.box);
  } catch (const PreconditionError& e) {
    throw ConfigError(e.what());
  }
}

void write_manifest(const fs::path& dir, const std::string& command, const std::string& config_text,
                    const Options& o, const nlohmann::json& extra) {
  nlohmann::json j;
  j["command"] = command;
  j["config"] = config_text;
  j["config_hash"] = hex(fnv1a(command + "\n" + config_text));
  j["version"] = HGR_VERSION;
  j["compiler"] = __VERSION__;
  j["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
               std::to_string(EIGEN_MINOR_VERSION);
  j["threads"] = thread_count();
  j["grid"] = {{"n", o.grid}, {"half_width", o.box}};
  j["data"] = {{"input", o.input}, {"kind", o.data}, {"amplitude", o.amplitude},
               {"bump_radius", o.bump_radius}, {"seed", o.seed}};
  for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  std::ofstream os(dir / "manifest.json");
  if (!os) throw ConfigError("cannot write manifest in " + dir.string());
  os << j.dump(2) << "\n";
}

fs::path out_dir(const Options& o) {
  fs::path d(o.out);
  std::error_code ec;
  fs::create_directories(d, ec);
  if (ec) throw ConfigError("cannot create output directory " + d.string() + ": " + ec.message());
  return d;
}

// ---- snapshots <-> states -----------------------------------------------------

const char* kAdmNames[12] = {"h11", "h12", "h13", "h22", "h23", "h33",
                             "K11", "K12", "K13", "K22", "K23", "K33"};

Snapshot adm_snapshot(const ADMData& d) {
  Snapshot s;
  s.grid = d.grid();
  for (int q = 0; q < 6; ++q) {
    s.names.push_back(kAdmNames[q]);
    s.fields.push_back(d.h[q]);
  }
  for (int q = 0; q < 6; ++q) {
    s.names.push_back(kAdmNames[6 + q]);
    s.fields.push_back(d.K[q]);
  }
  return s;
}

Snapshot state_snapshot(const StateField& U, double t) {
  Snapshot s;
  s.grid = U.grid();
  s.time = t;
  for (int i = 0; i < kStateSize; ++i) {
    s.names.push_back("U" + std::to_string(i));
    s.fields.push_back(U.comp[i]);
  }
  return s;
}

StateField state_from_snapshot(const Snapshot& s) {
  if (s.fields.size() == std::size_t(kStateSize)) {
    StateField U;
    U.comp = s.fields;
    return U;
  }
  if (s.fields.size() == 12) {
    ADMData d;
    for (int q = 0; q < 6; ++q) {
      d.h[q] = s.fields[q];
      d.K[q] = s.fields[6 + q];
    }
    d.validate();
    return initial_state(d);
  }
  throw ConfigError("snapshot has " + std::to_string(s.fields.size()) +
                    " components; expected 50 (state) or 12 (h, K)");
}

StateField load_data(const Options& o, double* t0 = nullptr) {
  if (t0) *t0 = 0.0;
  if (!o.resume.empty()) {
    const Snapshot s = read_snapshot(o.resume);
    if (t0) *t0 = s.time;
    return state_from_snapshot(s);
  }
  if (!o.input.empty()) return state_from_snapshot(read_snapshot(o.input));
  const Grid3 g = grid_of(o);
  if (o.data == "zero") return StateField::zeros(g);
  if (o.data == "slice") {
    SliceSpec spec;
    spec.amplitude = o.amplitude;
    spec.radius = o.bump_radius;
    return initial_state(minkowski_slice(g, spec));
  }
  if (o.data == "tt") {
    ADMData d = ADMData::flat(g);
    d.K = tt_curvature(g, o.amplitude, o.bump_radius);
    return initial_state(d);
  }
  throw ConfigError("unknown data kind '" + o.data + "' (slice | tt | zero)");
}

EvolutionConfig evolution_config(const Options& o, const Grid3& g) {
  EvolutionConfig cfg;
  cfg.grid = g;
  cfg.dt = o.dt;
  cfg.T = o.T;
  cfg.cfl = o.cfl;
  cfg.s = o.s;
  cfg.delta = o.delta;
  cfg.cadence = o.cadence;
  cfg.mode = parse_mode(o.mode);
  cfg.k_max = o.k_max;
  cfg.dissipation = o.dissipation;
  if (!(cfg.cfl > 0.0 && cfg.cfl <= 0.5)) throw ConfigError("--cfl must lie in (0, 0.5]");
  if (cfg.cadence < 1) throw ConfigError("--cadence must be >= 1");
  if (o.s < 0.0) throw ConfigError("--s must be nonnegative");
  return cfg;
}

// ---- commands -------------------------------------------------------------------

int cmd_norm(const Options& o) {
  Snapshot snap;
  if (o.input.empty()) throw ConfigError("norm needs --input SNAPSHOT");
  snap = read_snapshot(o.input);
  const Grid3& g = snap.grid;
  const DyadicPartition p = build_partition(g, default_j_max(g));
  const NormParams np{o.s, o.delta, o.gamma, o.m, o.beta};
  // Scalar norms over all components combine as an l2 sum (C^m_beta as a max).
  double hs = 0, hsd = 0, wint = 0, cmb = 0;
  for (const auto& f : snap.fields) {
    hs += std::pow(norm_hs(f, o.s), 2);
    hsd += std::pow(norm_hsd(f, p, np), 2);
    wint += std::pow(norm_weighted_integer(f, o.m, o.delta), 2);
    cmb = std::max(cmb, norm_cmb(f, o.m, o.beta));
  }
  ProductState V;
  if (snap.fields.size() == std::size_t(kStateSize)) {
    StateField U;
    U.comp = snap.fields;
    V = U.as_product();
  } else {
    const int n = int(snap.fields.size());
    V = ProductState::zeros(g, n);
    V.v1 = snap.fields;
  }
  std::printf("snapshot = %s (%zu components, n = %d, L = %g)\n", o.input.c_str(), snap.fields.size(),
              g.n, g.half_width);
  std::printf("params = s %g, delta %g, gamma %g, m %d, beta %g\n", o.s, o.delta, o.gamma, o.m, o.beta);
  std::printf("norm_hs = %.17g\n", std::sqrt(hs));
  std::printf("norm_hsd = %.17g\n", std::sqrt(hsd));
  std::printf("norm_weighted_integer = %.17g\n", std::sqrt(wint));
  std::printf("norm_cmb = %.17g\n", cmb);
  std::printf("norm_X = %.17g\n", norm_X(V, p, o.s, o.delta));
  std::printf("norm_Y = %.17g\n", norm_Y(V, o.delta));
  return kOk;
}

int cmd_check_structure(const Options& o) {
  const StateField U = load_data(o);
  const DyadicPartition p = build_partition(U.grid(), default_j_max(U.grid()));
  const StructureReport r = check_state_structure(U, p, o.s, o.delta);
  std::cout << r.to_text();
  if (!r.pass()) {
    std::string tags;
    for (const auto& c : r.conditions)
      if (!c.pass) tags += (tags.empty() ? "" : ", ") + c.tag;
    throw PreconditionError("structure conditions violated: " + tags);
  }
  return kOk;
}

struct ResidualSummary {
  double H = 0.0, M = 0.0;
};

ResidualSummary residuals(const ADMData& d, double excision) {
  const Grid3& g = d.grid();
  const auto mask = lichnerowicz_interior(g, excision);
  const ScalarField H = hamiltonian_residual(d, 2);
  const auto Mo = momentum_residual(d, 2);
  ResidualSummary s;
  for (std::size_t i = 0; i < g.size(); ++i) {
    // skip the first layer inside the boundary and next to the excision as well
    if (!mask[i] || g.boundary_distance(i) < 2 || g.radius(i) < excision + g.spacing()) continue;
    s.H = std::max(s.H, std::abs(H[i]));
    for (const auto& m : Mo) s.M = std::max(s.M, std::abs(m[i]));
  }
  return s;
}

int cmd_solve_constraints(const Options& o, const std::string& config_text) {
  const fs::path dir = out_dir(o);
  SeedSpec spec;
  spec.kind = o.seed;
  spec.amplitude = o.amplitude;
  spec.radius = o.seed_radius;
  spec.power = o.seed_power;
  spec.mass = o.mass;
  spec.excision_radius = o.excision;
  const double rex = o.seed == "schwarzschild-excision" ? o.excision : 0.0;

  std::ostringstream report;
  report.precision(6);
  std::vector<ResidualSummary> sums;
  std::vector<int> sizes;
  if (o.two_grids) sizes.push_back(o.grid / 2);
  sizes.push_back(o.grid);
  LichnerowiczResult last;
  for (int n : sizes) {
    Options on = o;
    on.grid = n;
    const Grid3 g = grid_of(on);
    LichnerowiczResult r = lichnerowicz_solve(make_seed(g, spec));
    const ResidualSummary s = residuals(r.data, rex);
    report << "grid " << n << ": newton_iterations = " << r.newton_iterations
           << ", max_H = " << s.H << ", max_M = " << s.M << "\n";
    sums.push_back(s);
    last = std::move(r);
  }
  if (sums.size() == 2) {
    auto ratio = [](double a, double b) { return b > 0.0 ? a / b : 0.0; };
    report << "refinement_ratio_H = " << ratio(sums[0].H, sums[1].H)
           << "  (4 for second order)\n";
    report << "refinement_ratio_M = " << ratio(sums[0].M, sums[1].M) << "\n";
  }
  std::cout << report.str();
  write_snapshot(dir / "adm.snap", adm_snapshot(last.data));
  write_snapshot(dir / "state.snap", state_snapshot(initial_state(last.data), 0.0));
  std::ofstream(dir / "residuals.txt") << report.str();
  write_manifest(dir, "solve-constraints", config_text, o, {{"outputs", {"adm.snap", "state.snap", "residuals.txt"}}});
  return kOk;
}

int cmd_evolve(const Options& o, const std::string& config_text) {
  const fs::path dir = out_dir(o);
  double t0 = 0.0;
  const StateField U0 = load_data(o, &t0);
  EvolutionConfig cfg = evolution_config(o, U0.grid());
  if (cfg.mode == EvolutionMode::Picard) throw ConfigError("use the picard command for --mode picard");
  cfg.T = o.T - t0;
  if (cfg.T < 0.0) throw ConfigError("--T is earlier than the resume time");
  EvolveOptions opt;
  opt.checkpoint = dir / "final.snap";
  const EvolutionResult res = evolve(U0, cfg, opt);
  MonitorSeries series = res.series;
  for (auto& r : series.records) r.t += t0;
  series.write_csv(dir / "monitors.csv");
  // the checkpoint carries the absolute time
  write_snapshot(dir / "final.snap", state_snapshot(res.final_state, t0 + res.final_time));
  const RateCheck rc = energy_rate_check(series);
  const RateCheck ry = energy_rate_check(series, true);
  const SandwichCheck sw = norm_sandwich(series);
  std::printf("steps = %d\ndt = %.17g\nfinal_time = %.17g\n", res.steps, res.dt, t0 + res.final_time);
  std::printf("energy_rate: C_hat = %.6g, max_violation = %.6g\n", rc.c_hat, rc.max_violation);
  std::printf("y_energy_rate: C_hat = %.6g, max_violation = %.6g\n", ry.c_hat, ry.max_violation);
  std::printf("norm_sandwich: lower = %.6g, upper = %.6g\n", sw.worst_lower, sw.worst_upper);
  write_manifest(dir, "evolve", config_text, o,
                 {{"resume_time", t0}, {"outputs", {"monitors.csv", "final.snap"}}});
  if (series.aborted) {
    std::fprintf(stderr, "evolution aborted at t = %.17g: %s\n", t0 + series.last_good_time,
                 series.abort_reason.c_str());
    return kNumeric;
  }
  return kOk;
}

int cmd_picard(const Options& o, const std::string& config_text) {
  const fs::path dir = out_dir(o);
  const StateField U0 = load_data(o);
  EvolutionConfig cfg = evolution_config(o, U0.grid());
  cfg.mode = EvolutionMode::Picard;
  const PicardResult pr = picard_iterate(U0, cfg);
  std::ofstream csv(dir / "picard.csv");
  csv << "k,sup_norm_x,sup_diff_y,ratio\n";
  csv.precision(17);
  const auto ratios = pr.ratios();
  for (const auto& it : pr.iterates) {
    const double r = it.k >= 2 && std::size_t(it.k - 2) < ratios.size() ? ratios[it.k - 2] : 0.0;
    csv << it.k << ',' << it.sup_norm_x << ',' << it.sup_diff_y << ',' << r << "\n";
    if (it.k >= 1) it.series.write_csv(dir / ("iterate_" + std::to_string(it.k) + ".csv"));
    std::printf("k = %d  sup ||U^k||_X = %.6e  sup ||U^k - U^(k-1)||_Y = %.6e\n", it.k, it.sup_norm_x,
                it.sup_diff_y);
  }
  if (!pr.final_trajectory.empty())
    write_snapshot(dir / "final.snap", state_snapshot(pr.final_trajectory.back(), cfg.T));
  write_manifest(dir, "picard", config_text, o, {{"outputs", {"picard.csv", "final.snap"}}});
  if (pr.aborted) {
    std::fprintf(stderr, "picard aborted: %s\n", pr.abort_reason.c_str());
    return kNumeric;
  }
  return kOk;
}

int cmd_verify(const Options& o, const std::string& config_text) {
  const fs::path dir = out_dir(o);
  std::vector<int> ids = o.only.empty() ? verify::criterion_ids() : o.only;
  std::ofstream log(dir / "verify.txt");
  std::vector<verify::CriterionResult> results;
  for (int id : ids) {
    if (verify::criterion_title(id).empty()) throw ConfigError("unknown criterion " + std::to_string(id));
    verify::VerifyOptions vo;
    vo.log = &std::cerr;
    results.push_back(verify::run_criterion(id, vo));
    const auto& r = results.back();
    log << verify::summary_line(r) << "\n";
    for (const auto& d : r.details) log << "    " << d << "\n";
    log.flush();
  }
  bool all = true;
  std::cout << "acceptance summary\n";
  for (const auto& r : results) {
    std::cout << verify::summary_line(r) << "\n";
    all = all && r.pass;
  }
  write_manifest(dir, "verify-all", config_text, o, {{"outputs", {"verify.txt"}}});
  if (!all) throw AcceptanceFailure("one or more acceptance criteria failed (details in verify.txt)");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hgr: harmonic-gauge Einstein evolution and weighted Sobolev norm tools"};
  app.set_version_flag("--version", HGR_VERSION);
  app.require_subcommand(1);
  app.fallthrough();
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.set_config("--config", "", "INI configuration file (key = value, [command] sections)");

  Options o;
  app.add_option("--grid", o.grid, "points per axis (power of two)")->capture_default_str();
  app.add_option("--box", o.box, "box half-width L")->capture_default_str();
  app.add_option("--s", o.s, "regularity index s")->capture_default_str();
  app.add_option("--delta", o.delta, "weight delta")->capture_default_str();
  app.add_option("--gamma", o.gamma, "cutoff power gamma")->capture_default_str();
  app.add_option("--dt", o.dt, "time step (0: from --cfl)")->capture_default_str();
  app.add_option("--T", o.T, "final time")->capture_default_str();
  app.add_option("--cfl", o.cfl, "Courant factor, at most 0.5")->capture_default_str();
  app.add_option("--mode", o.mode, "quasilinear | linear-frozen | picard")->capture_default_str();
  app.add_option("--out", o.out, "output directory")->capture_default_str();
  app.add_option("--resume", o.resume, "resume from a state snapshot");
  app.add_option("--input", o.input, "input snapshot (state or h, K)");
  app.add_option("--data", o.data, "generated data: slice | tt | zero")->capture_default_str();
  app.add_option("--amplitude", o.amplitude, "data amplitude")->capture_default_str();
  app.add_option("--bump-radius", o.bump_radius, "radius of the generated bump")->capture_default_str();

  auto* norm = app.add_subcommand("norm", "print the six norms of a snapshot");
  norm->add_option("--m", o.m, "derivative order for integer norms")->capture_default_str();
  norm->add_option("--beta", o.beta, "weight of the C^m_beta norm")->capture_default_str();

  auto* cs = app.add_subcommand("check-structure", "check the symmetric hyperbolic structure of a state");

  auto* sc = app.add_subcommand("solve-constraints", "solve the Lichnerowicz equation for a seed");
  sc->add_option("--seed", o.seed, "zero | gaussian-tt | schwarzschild-excision")->capture_default_str();
  sc->add_option("--seed-radius", o.seed_radius, "radius of the TT bump")->capture_default_str();
  sc->add_option("--seed-power", o.seed_power, "power of the TT bump")->capture_default_str();
  sc->add_option("--mass", o.mass, "excised point mass M")->capture_default_str();
  sc->add_option("--excision", o.excision, "excision radius")->capture_default_str();
  sc->add_option("--two-grids", o.two_grids, "also solve at half resolution")->capture_default_str();

  auto* ev = app.add_subcommand("evolve", "time-step the reduced system and write monitors");
  auto* pc = app.add_subcommand("picard", "run the Picard iteration");
  for (auto* sub : {ev, pc}) {
    sub->add_option("--cadence", o.cadence, "monitor cadence in steps")->capture_default_str();
    sub->add_option("--dissipation", o.dissipation, "Kreiss-Oliger strength")->capture_default_str();
  }
  pc->add_option("--k-max", o.k_max, "number of iterates")->capture_default_str();

  auto* va = app.add_subcommand("verify-all", "run the acceptance suite");
  va->add_option("--only", o.only, "criterion numbers to run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  const std::string config_text = app.config_to_str(true, false);
  try {
    thread_count();
    if (*norm) return cmd_norm(o);
    if (*cs) return cmd_check_structure(o);
    if (*sc) return cmd_solve_constraints(o, config_text);
    if (*ev) return cmd_evolve(o, config_text);
    if (*pc) return cmd_picard(o, config_text);
    if (*va) return cmd_verify(o, config_text);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition error: " << e.what() << "\n";
    return kPrecondition;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kNumeric;
  } catch (const AcceptanceFailure& e) {
    std::cerr << "acceptance failure: " << e.what() << "\n";
    return kAcceptance;
  }
  return kOk;
}
