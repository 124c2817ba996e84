#include "hgr/constraints.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "hgr/error.hpp"
#include "hgr/finite_difference.hpp"

namespace hgr {
namespace {

constexpr int kSym3[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};

Mat3 mat3_from(const std::array<ScalarField, 6>& f, std::size_t idx) {
  Mat3 m;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) m[a][b] = f[kSym3[a][b]][idx];
  return m;
}

Mat3 invert3(const Mat3& h) {
  Eigen::Matrix3d m;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) m(a, b) = h[a][b];
  const Eigen::Matrix3d inv = m.inverse();
  Mat3 out;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) out[a][b] = 0.5 * (inv(a, b) + inv(b, a));
  return out;
}

// Local derivative data of the 3-metric at one point.
struct Local3 {
  Mat3 h, hinv, K;
  std::array<Mat3, 3> dh;                  // dh[c][a][b] = d_c h_ab
  std::array<std::array<Mat3, 3>, 3> ddh;  // ddh[c][d][a][b]
  std::array<Mat3, 3> dK;                  // dK[c][a][b]
  std::array<Mat3, 3> gam;                 // gam[m][a][b] = Gamma^m_ab
};

Local3 gather(const ADMData& d, const Neighbors& nb, std::size_t idx, double dx, int order,
              bool second, bool curvature_derivs) {
  Local3 L{};
  L.h = mat3_from(d.h, idx);
  L.K = mat3_from(d.K, idx);
  L.hinv = invert3(L.h);
  for (int q = 0; q < 6; ++q) {
    int a = 0, b = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (kSym3[i][j] == q && i <= j) a = i, b = j;
    for (int c = 0; c < 3; ++c) {
      const double v = d1(d.h[q].data(), nb, c, dx, order);
      L.dh[c][a][b] = L.dh[c][b][a] = v;
      if (curvature_derivs) {
        const double w = d1(d.K[q].data(), nb, c, dx, order);
        L.dK[c][a][b] = L.dK[c][b][a] = w;
      }
      if (second) {
        for (int e = c; e < 3; ++e) {
          const double s = d2(d.h[q].data(), nb, c, e, dx, order);
          L.ddh[c][e][a][b] = L.ddh[c][e][b][a] = s;
          L.ddh[e][c][a][b] = L.ddh[e][c][b][a] = s;
        }
      }
    }
  }
  for (int m = 0; m < 3; ++m)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        double s = 0.0;
        for (int n = 0; n < 3; ++n)
          s += L.hinv[m][n] * 0.5 * (L.dh[a][n][b] + L.dh[b][n][a] - L.dh[n][a][b]);
        L.gam[m][a][b] = s;
      }
  return L;
}

double scalar_curvature_local(const Local3& L) {
  // d_d Gamma^m_ab = d_d h^{mn} Gamma_nab + h^{mn} d_d Gamma_nab
  std::array<std::array<Mat3, 3>, 3> dgam{};
  std::array<Mat3, 3> dinv{};
  for (int c = 0; c < 3; ++c)
    for (int m = 0; m < 3; ++m)
      for (int n = 0; n < 3; ++n) {
        double s = 0.0;
        for (int p = 0; p < 3; ++p)
          for (int q = 0; q < 3; ++q) s -= L.hinv[m][p] * L.hinv[n][q] * L.dh[c][p][q];
        dinv[c][m][n] = s;
      }
  for (int d = 0; d < 3; ++d)
    for (int m = 0; m < 3; ++m)
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          double s = 0.0;
          for (int n = 0; n < 3; ++n) {
            const double low = 0.5 * (L.dh[a][n][b] + L.dh[b][n][a] - L.dh[n][a][b]);
            const double dlow =
                0.5 * (L.ddh[d][a][n][b] + L.ddh[d][b][n][a] - L.ddh[d][n][a][b]);
            s += dinv[d][m][n] * low + L.hinv[m][n] * dlow;
          }
          dgam[d][m][a][b] = s;
        }
  double R = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      double rab = 0.0;
      for (int m = 0; m < 3; ++m) {
        rab += dgam[m][m][a][b] - dgam[b][m][a][m];
        for (int n = 0; n < 3; ++n)
          rab += L.gam[m][m][n] * L.gam[n][a][b] - L.gam[m][b][n] * L.gam[n][a][m];
      }
      R += L.hinv[a][b] * rab;
    }
  return R;
}

double kk_terms(const Local3& L) {
  // -K_ab K^ab + (tr K)^2
  double tr = 0.0, kk = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      tr += L.hinv[a][b] * L.K[a][b];
      for (int c = 0; c < 3; ++c)
        for (int e = 0; e < 3; ++e) kk += L.hinv[a][c] * L.hinv[b][e] * L.K[a][b] * L.K[c][e];
    }
  return -kk + tr * tr;
}

template <class Kernel>
void interior_pointwise(const Grid3& grid, int ring, Kernel&& k) {
  const long long n = static_cast<long long>(grid.size());
#pragma omp parallel for schedule(static)
  for (long long idx = 0; idx < n; ++idx) {
    if (grid.boundary_distance(idx) < ring) continue;
    k(std::size_t(idx));
  }
}

void check_order(int order) {
  if (order != 2 && order != 4) throw PreconditionError("constraints: order must be 2 or 4");
}

}  // namespace

int sym3_index(int a, int b) { return kSym3[a][b]; }

ADMData ADMData::flat(const Grid3& grid) {
  ADMData d;
  for (int q = 0; q < 6; ++q) {
    const bool diag = q == 0 || q == 3 || q == 5;
    d.h[q] = ScalarField(grid, diag ? 1.0 : 0.0);
    d.K[q] = ScalarField(grid);
  }
  return d;
}

Mat3 ADMData::h_at(std::size_t idx) const { return mat3_from(h, idx); }
Mat3 ADMData::K_at(std::size_t idx) const { return mat3_from(K, idx); }

void ADMData::validate() const {
  const Grid3& g = grid();
  for (int q = 0; q < 6; ++q) {
    require_same_grid(h[q].grid(), g, "ADM data");
    require_same_grid(K[q].grid(), g, "ADM data");
  }
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const Mat3 m = h_at(idx);
    Eigen::Matrix3d e;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) e(a, b) = m[a][b];
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(e, Eigen::EigenvaluesOnly);
    if (!(es.eigenvalues()(0) > 0.0)) {
      const auto x = g.position(idx);
      std::ostringstream os;
      os << "ADM data: h not positive definite at (" << x[0] << ", " << x[1] << ", " << x[2] << ")";
      throw PreconditionError(os.str());
    }
  }
}

ScalarField scalar_curvature(const ADMData& d, int order) {
  check_order(order);
  d.validate();
  const Grid3& g = d.grid();
  ScalarField out(g);
  interior_pointwise(g, order / 2, [&](std::size_t idx) {
    const Neighbors nb(g, idx);
    out[idx] = scalar_curvature_local(gather(d, nb, idx, g.spacing(), order, true, false));
  });
  return out;
}

ScalarField hamiltonian_residual(const ADMData& d, int order) {
  check_order(order);
  d.validate();
  const Grid3& g = d.grid();
  ScalarField out(g);
  interior_pointwise(g, order / 2, [&](std::size_t idx) {
    const Neighbors nb(g, idx);
    const Local3 L = gather(d, nb, idx, g.spacing(), order, true, false);
    out[idx] = scalar_curvature_local(L) + kk_terms(L);
  });
  return out;
}

std::array<ScalarField, 3> momentum_residual(const ADMData& d, int order) {
  check_order(order);
  d.validate();
  const Grid3& g = d.grid();
  std::array<ScalarField, 3> out{ScalarField(g), ScalarField(g), ScalarField(g)};
  interior_pointwise(g, order / 2, [&](std::size_t idx) {
    const Neighbors nb(g, idx);
    const Local3 L = gather(d, nb, idx, g.spacing(), order, false, true);
    for (int b = 0; b < 3; ++b) {
      // h^{ac} (d_a K_cb - Gamma^e_ac K_eb - Gamma^e_ab K_ce)
      double div = 0.0;
      for (int a = 0; a < 3; ++a)
        for (int c = 0; c < 3; ++c) {
          double cov = L.dK[a][c][b];
          for (int e = 0; e < 3; ++e) cov -= L.gam[e][a][c] * L.K[e][b] + L.gam[e][a][b] * L.K[c][e];
          div += L.hinv[a][c] * cov;
        }
      // d_b (h^{ac} K_ac) = d_b h^{ac} K_ac + h^{ac} d_b K_ac
      double dtr = 0.0;
      for (int a = 0; a < 3; ++a)
        for (int c = 0; c < 3; ++c) {
          double dinv = 0.0;
          for (int p = 0; p < 3; ++p)
            for (int q = 0; q < 3; ++q) dinv -= L.hinv[a][p] * L.hinv[c][q] * L.dh[b][p][q];
          dtr += dinv * L.K[a][c] + L.hinv[a][c] * L.dK[b][a][c];
        }
      out[b][idx] = div - dtr;
    }
  });
  return out;
}

CauchyData assemble_cauchy_data(const ADMData& d) {
  d.validate();
  const Grid3& grid = d.grid();
  std::array<ScalarField, kN> comps;
  std::array<ScalarField, kN> gt;
  for (int q = 0; q < kN; ++q) {
    comps[q] = ScalarField(grid);
    gt[q] = ScalarField(grid);
  }
  comps[sym_index(0, 0)] = ScalarField(grid, -1.0);
  for (int a = 0; a < 3; ++a)
    for (int b = a; b < 3; ++b) {
      comps[sym_index(a + 1, b + 1)] = d.h[kSym3[a][b]];
      gt[sym_index(a + 1, b + 1)] = -2.0 * d.K[kSym3[a][b]];
    }
  // Spatial derivatives d_c h_ab (fourth order, as used by the evolution).
  std::array<std::array<ScalarField, 6>, 3> dh;
  for (int c = 0; c < 3; ++c)
    for (int q = 0; q < 6; ++q) dh[c][q] = derivative(d.h[q], c);
  const long long n = static_cast<long long>(grid.size());
#pragma omp parallel for schedule(static)
  for (long long idx = 0; idx < n; ++idx) {
    const Mat3 hinv = invert3(d.h_at(idx));
    const Mat3 K = d.K_at(idx);
    double g00 = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) g00 += 2.0 * hinv[a][b] * K[a][b];
    gt[sym_index(0, 0)][idx] = g00;
    for (int a = 0; a < 3; ++a) {
      double s = 0.0;
      for (int b = 0; b < 3; ++b)
        for (int c = 0; c < 3; ++c)
          s += hinv[b][c] * (dh[c][kSym3[a][b]][idx] - 0.5 * dh[a][kSym3[b][c]][idx]);
      gt[sym_index(0, a + 1)][idx] = s;
    }
  }
  CauchyData out{MetricField::from_components(std::move(comps)), std::move(gt)};
  invert_metric(out.g);
  return out;
}

ADMData schwarzschild_isotropic(const Grid3& grid, double mass, double r_floor) {
  if (mass < 0.0) throw PreconditionError("schwarzschild: mass must be >= 0");
  ADMData d = ADMData::flat(grid);
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    const double r = std::max(grid.radius(idx), r_floor);
    const double psi = 1.0 + mass / (2.0 * r);
    const double p4 = psi * psi * psi * psi;
    d.h[0][idx] = d.h[3][idx] = d.h[5][idx] = p4;
  }
  return d;
}

std::array<ScalarField, 6> tt_curvature(const Grid3& grid, double amplitude, double radius,
                                        int power, std::array<double, 3> center) {
  if (power < 4) throw PreconditionError("tt_curvature: power must be >= 4");
  if (!(radius > 0.0)) throw PreconditionError("tt_curvature: radius must be positive");
  std::array<ScalarField, 6> K;
  for (auto& f : K) f = ScalarField(grid);
  const double p = power;
  const double R2 = radius * radius;
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    const auto x = grid.position(idx);
    const std::array<double, 3> y{x[0] - center[0], x[1] - center[1], x[2] - center[2]};
    const double w = 1.0 - (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]) / R2;
    if (w <= 0.0) continue;
    std::array<double, 3> wi;
    for (int i = 0; i < 3; ++i) wi[i] = -2.0 * y[i] / R2;
    const double wij = -2.0 / R2;
    const double c3 = p * (p - 1) * (p - 2) * std::pow(w, p - 3);
    const double c2 = p * (p - 1) * std::pow(w, p - 2);
    auto f3 = [&](int i, int j, int k) {
      const double dij = i == j ? wij : 0.0, dik = i == k ? wij : 0.0, djk = j == k ? wij : 0.0;
      return c3 * wi[i] * wi[j] * wi[k] + c2 * (dij * wi[k] + dik * wi[j] + djk * wi[i]);
    };
    K[0][idx] = 2.0 * f3(0, 1, 2);
    K[3][idx] = -2.0 * f3(0, 1, 2);
    K[5][idx] = 0.0;
    K[1][idx] = f3(1, 1, 2) - f3(0, 0, 2);
    K[2][idx] = -f3(1, 1, 1) - f3(0, 0, 1);
    K[4][idx] = f3(0, 0, 0) + f3(0, 1, 1);
  }
  double m = 0.0;
  for (const auto& f : K) m = std::max(m, f.max_abs());
  if (m > 0.0)
    for (auto& f : K) f *= amplitude / m;
  return K;
}

std::vector<std::string> seed_kinds() { return {"zero", "gaussian-tt", "schwarzschild-excision"}; }

ConformalSeed make_seed(const Grid3& grid, const SeedSpec& spec) {
  ConformalSeed seed;
  seed.free = ADMData::flat(grid);
  if (spec.kind == "zero") return seed;
  if (spec.kind == "gaussian-tt") {
    seed.free.K = tt_curvature(grid, spec.amplitude, spec.radius, spec.power);
    seed.mass = spec.mass;
    seed.excision_radius = spec.mass > 0.0 ? spec.excision_radius : 0.0;
    return seed;
  }
  if (spec.kind == "schwarzschild-excision") {
    seed.mass = spec.mass;
    seed.excision_radius = spec.excision_radius;
    return seed;
  }
  throw ConfigError("unknown seed kind '" + spec.kind + "'");
}

std::string delta_window(double delta) {
  std::ostringstream os;
  const bool constraint = delta > -1.5 && delta < -0.5;
  const bool energy = delta >= -1.5;
  os << "delta = " << delta << ": constraint-solve window (-3/2, -1/2) "
     << (constraint ? "satisfied" : "not satisfied") << "; energy-estimate window delta >= -3/2 "
     << (energy ? "satisfied" : "not satisfied");
  return os.str();
}

}  // namespace hgr
