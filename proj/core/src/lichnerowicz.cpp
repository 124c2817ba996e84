#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <cmath>
#include <sstream>

#include "hgr/constraints.hpp"
#include "hgr/error.hpp"
#include "hgr/finite_difference.hpp"

namespace hgr {
namespace {

enum class Row : char { Interior, Robin, Dirichlet };

struct Layout {
  std::vector<Row> kind;
  std::vector<std::size_t> robin_neighbor;
  std::vector<double> robin_c;
  std::vector<double> dirichlet;
};

bool on_outer_layer(const Grid3& g, std::size_t idx) {
  const auto p = g.ijk(idx);
  for (int c : p)
    if (c == 0 || c == g.n - 1) return true;
  return false;
}

Layout make_layout(const Grid3& g, double mass, double r_ex) {
  Layout L;
  L.kind.assign(g.size(), Row::Interior);
  L.robin_neighbor.assign(g.size(), 0);
  L.robin_c.assign(g.size(), 0.0);
  L.dirichlet.assign(g.size(), 0.0);
  // Keeps the Dirichlet values finite at the origin; never reached when r_ex > 0
  // exceeds the floor.
  const double r_floor = 0.5 * g.spacing();
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const double r = g.radius(idx);
    if (on_outer_layer(g, idx)) {
      auto p = g.ijk(idx);
      for (int& c : p) {
        if (c == 0) c = 1;
        else if (c == g.n - 1) c = g.n - 2;
      }
      const std::size_t nb = g.index(p[0], p[1], p[2]);
      L.kind[idx] = Row::Robin;
      L.robin_neighbor[idx] = nb;
      L.robin_c[idx] = g.radius(nb) / r;
    } else if (r < r_ex) {
      L.kind[idx] = Row::Dirichlet;
      L.dirichlet[idx] = 1.0 + mass / (2.0 * std::max(r, r_floor));
    }
  }
  return L;
}

// Residual of the discrete problem at phi.
Eigen::VectorXd residual(const Grid3& g, const Layout& L, const std::vector<double>& A,
                         const Eigen::VectorXd& phi) {
  const double ih2 = 1.0 / (g.spacing() * g.spacing());
  Eigen::VectorXd F(phi.size());
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    switch (L.kind[idx]) {
      case Row::Robin:
        F[idx] = phi[idx] - L.robin_c[idx] * phi[L.robin_neighbor[idx]] - (1.0 - L.robin_c[idx]);
        break;
      case Row::Dirichlet:
        F[idx] = phi[idx] - L.dirichlet[idx];
        break;
      case Row::Interior: {
        const Neighbors nb(g, idx);
        double lap = -6.0 * phi[idx];
        for (int a = 0; a < 3; ++a) lap += phi[nb.at(a, 1)] + phi[nb.at(a, -1)];
        F[idx] = lap * ih2 + 0.125 * A[idx] * std::pow(phi[idx], -7.0);
        break;
      }
    }
  }
  return F;
}

Eigen::SparseMatrix<double, Eigen::RowMajor> jacobian(const Grid3& g, const Layout& L,
                                                      const std::vector<double>& A,
                                                      const Eigen::VectorXd& phi) {
  const double ih2 = 1.0 / (g.spacing() * g.spacing());
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(g.size() * 7);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const auto row = static_cast<int>(idx);
    switch (L.kind[idx]) {
      case Row::Robin:
        t.emplace_back(row, row, 1.0);
        t.emplace_back(row, int(L.robin_neighbor[idx]), -L.robin_c[idx]);
        break;
      case Row::Dirichlet:
        t.emplace_back(row, row, 1.0);
        break;
      case Row::Interior: {
        const Neighbors nb(g, idx);
        t.emplace_back(row, row, -6.0 * ih2 - 0.875 * A[idx] * std::pow(phi[idx], -8.0));
        for (int a = 0; a < 3; ++a) {
          t.emplace_back(row, int(nb.at(a, 1)), ih2);
          t.emplace_back(row, int(nb.at(a, -1)), ih2);
        }
        break;
      }
    }
  }
  Eigen::SparseMatrix<double, Eigen::RowMajor> J(g.size(), g.size());
  J.setFromTriplets(t.begin(), t.end());
  return J;
}

// Row-scaled max norm so interior and boundary rows are comparable.
double scaled_norm(const Grid3& g, const Layout& L, const Eigen::VectorXd& F) {
  const double h2 = g.spacing() * g.spacing();
  double m = 0.0;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const double v = L.kind[idx] == Row::Interior ? F[idx] * h2 : F[idx];
    m = std::max(m, std::abs(v));
  }
  return m;
}

void check_free_data(const ConformalSeed& seed, const LichnerowiczOptions& opt) {
  const ADMData& d = seed.free;
  d.validate();
  for (int q = 0; q < 6; ++q) {
    const bool diag = q == 0 || q == 3 || q == 5;
    for (double v : d.h[q].values())
      if (v != (diag ? 1.0 : 0.0))
        throw PreconditionError("lichnerowicz: free metric must be the flat identity");
  }
  double kmax = 0.0;
  for (const auto& f : d.K) kmax = std::max(kmax, f.max_abs());
  if (kmax == 0.0) return;
  const Grid3& g = d.grid();
  double tr = 0.0;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    tr = std::max(tr, std::abs(d.K[0][idx] + d.K[3][idx] + d.K[5][idx]));
  }
  if (tr > opt.trace_tol * kmax) throw PreconditionError("lichnerowicz: free K is not trace-free");
  // Divergence against the size of the individual derivative terms.
  double div = 0.0, scale = 0.0;
  for (int b = 0; b < 3; ++b) {
    ScalarField s(g);
    for (int a = 0; a < 3; ++a) {
      const ScalarField t = derivative(d.K[sym3_index(a, b)], a);
      scale = std::max(scale, t.max_abs());
      s += t;
    }
    div = std::max(div, s.max_abs());
  }
  if (div > opt.divergence_tol * scale) {
    std::ostringstream os;
    os << "lichnerowicz: free K is not divergence-free (relative divergence " << div / scale << ")";
    throw PreconditionError(os.str());
  }
}

}  // namespace

std::vector<char> lichnerowicz_interior(const Grid3& grid, double excision_radius) {
  std::vector<char> mask(grid.size(), 0);
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    mask[idx] = !on_outer_layer(grid, idx) && grid.radius(idx) >= excision_radius;
  }
  return mask;
}

LichnerowiczResult lichnerowicz_solve(const ConformalSeed& seed, const LichnerowiczOptions& opt) {
  if (seed.mass < 0.0) throw PreconditionError("lichnerowicz: mass must be >= 0");
  if (seed.mass > 0.0 && !(seed.excision_radius > 0.0)) {
    throw PreconditionError("lichnerowicz: a positive mass needs an excision radius");
  }
  check_free_data(seed, opt);
  const Grid3& g = seed.free.grid();
  Layout L = make_layout(g, seed.mass, seed.excision_radius);
  if (!opt.robin_outer) {
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
      if (L.kind[idx] == Row::Robin) {
        L.kind[idx] = Row::Dirichlet;
        L.dirichlet[idx] = 1.0;
      }
    }
  }
  std::vector<double> A(g.size(), 0.0);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const Mat3 K = seed.free.K_at(idx);
    double s = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) s += K[a][b] * K[a][b];
    A[idx] = s;
  }

  Eigen::VectorXd phi(g.size());
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    if (seed.phi.size() == g.size()) phi[idx] = seed.phi[idx];
    else phi[idx] = L.kind[idx] == Row::Dirichlet ? L.dirichlet[idx] : 1.0;
  }

  LichnerowiczResult res;
  Eigen::VectorXd F = residual(g, L, A, phi);
  double fnorm = scaled_norm(g, L, F);
  bool converged = false;
  for (int it = 0; it < opt.max_newton; ++it) {
    const auto J = jacobian(g, L, A, phi);
    Eigen::BiCGSTAB<Eigen::SparseMatrix<double, Eigen::RowMajor>, Eigen::IncompleteLUT<double>> solver;
    solver.preconditioner().setDroptol(1e-4);
    solver.setTolerance(opt.linear_tol);
    solver.setMaxIterations(20000);
    solver.compute(J);
    if (solver.info() != Eigen::Success) throw NumericError("lichnerowicz: preconditioner setup failed");
    const Eigen::VectorXd step = solver.solve(-F);
    res.linear_iterations += int(solver.iterations());
    if (!step.allFinite()) throw NumericError("lichnerowicz: linear solve produced non-finite values");

    double t = 1.0;
    Eigen::VectorXd trial = phi + step;
    Eigen::VectorXd Ft = residual(g, L, A, trial);
    double tnorm = scaled_norm(g, L, Ft);
    for (int h = 0; h < opt.max_halvings && !(tnorm <= fnorm) && trial.minCoeff() > 0.0; ++h) {
      t *= 0.5;
      trial = phi + t * step;
      Ft = residual(g, L, A, trial);
      tnorm = scaled_norm(g, L, Ft);
    }
    if (!(trial.minCoeff() > 0.0)) throw NumericError("lichnerowicz: conformal factor lost positivity");
    const double corr = t * step.lpNorm<Eigen::Infinity>();
    phi = trial;
    F = Ft;
    fnorm = tnorm;
    res.correction_history.push_back(corr);
    res.newton_iterations = it + 1;
    if (corr <= opt.newton_tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    std::ostringstream os;
    os << "lichnerowicz: Newton did not converge in " << opt.max_newton << " iterations";
    throw NumericError(os.str());
  }

  res.phi = ScalarField(g);
  for (std::size_t idx = 0; idx < g.size(); ++idx) res.phi[idx] = phi[idx];
  res.data = ADMData::flat(g);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const double p = phi[idx];
    const double p4 = p * p * p * p;
    res.data.h[0][idx] = res.data.h[3][idx] = res.data.h[5][idx] = p4;
    for (int q = 0; q < 6; ++q) res.data.K[q][idx] = seed.free.K[q][idx] / (p * p);
  }
  return res;
}

}  // namespace hgr
