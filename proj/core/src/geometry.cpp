#include "hgr/geometry.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "hgr/error.hpp"
#include "hgr/finite_difference.hpp"

namespace hgr {
namespace {

constexpr int kSym[4][4] = {{0, 1, 2, 3}, {1, 4, 5, 6}, {2, 5, 7, 8}, {3, 6, 8, 9}};
constexpr int kPair[kN][2] = {{0, 0}, {0, 1}, {0, 2}, {0, 3}, {1, 1},
                              {1, 2}, {1, 3}, {2, 2}, {2, 3}, {3, 3}};

Mat4 from_fields(const std::array<ScalarField, kN>& f, std::size_t idx) {
  Mat4 m;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) m[a][b] = f[kSym[a][b]][idx];
  return m;
}

// Gamma_{a c e} = (d_e g_ac + d_c g_ae - d_a g_ce) / 2, stored as G[a][c][e].
std::array<Mat4, 4> christoffel_first(const Deriv1& dg) {
  std::array<Mat4, 4> G;
  for (int a = 0; a < 4; ++a)
    for (int c = 0; c < 4; ++c)
      for (int e = 0; e < 4; ++e) G[a][c][e] = 0.5 * (dg[e][a][c] + dg[c][a][e] - dg[a][c][e]);
  return G;
}

Mat4 conj(const Mat4& ginv, const Mat4& m) {
  // ginv * m * ginv
  Mat4 t{}, out{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double s = 0.0;
      for (int k = 0; k < 4; ++k) s += ginv[i][k] * m[k][j];
      t[i][j] = s;
    }
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double s = 0.0;
      for (int k = 0; k < 4; ++k) s += t[i][k] * ginv[k][j];
      out[i][j] = s;
    }
  return out;
}

double contract(const Mat4& a, const Mat4& b) {
  double s = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) s += a[i][j] * b[i][j];
  return s;
}

// 2 g^{cd} g^{ef} X[a][c][e] Y[b][d][f] for all a, b.
Mat4 quad_form(const Mat4& ginv, const std::array<Mat4, 4>& x, const std::array<Mat4, 4>& y) {
  std::array<Mat4, 4> px;
  for (int a = 0; a < 4; ++a) px[a] = conj(ginv, x[a]);
  Mat4 out{};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) out[a][b] = 2.0 * contract(px[a], y[b]);
  return out;
}

// M[a][c][e] = d_e g_ca
std::array<Mat4, 4> gradient_slices(const Deriv1& dg) {
  std::array<Mat4, 4> m;
  for (int a = 0; a < 4; ++a)
    for (int c = 0; c < 4; ++c)
      for (int e = 0; e < 4; ++e) m[a][c][e] = dg[e][c][a];
  return m;
}

// d_c g^{mn} = -g^{mp} g^{nq} d_c g_pq
std::array<Mat4, 4> inverse_derivative(const Mat4& ginv, const Deriv1& dg) {
  std::array<Mat4, 4> out;
  for (int c = 0; c < 4; ++c) {
    const Mat4 t = conj(ginv, dg[c]);
    for (int m = 0; m < 4; ++m)
      for (int n = 0; n < 4; ++n) out[c][m][n] = -t[m][n];
  }
  return out;
}

}  // namespace

int sym_index(int a, int b) { return kSym[a][b]; }
std::array<int, 2> sym_pair(int c) { return {kPair[c][0], kPair[c][1]}; }

Mat4 zero4() { return Mat4{}; }

Mat4 minkowski4() {
  Mat4 m{};
  m[0][0] = -1.0;
  m[1][1] = m[2][2] = m[3][3] = 1.0;
  return m;
}

Mat4 invert4(const Mat4& g, double* det) {
  Eigen::Matrix4d m;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) m(a, b) = g[a][b];
  const Eigen::Matrix4d inv = m.inverse();
  if (det) *det = m.determinant();
  Mat4 out;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) out[a][b] = 0.5 * (inv(a, b) + inv(b, a));
  return out;
}

Christoffel4 christoffel_point(const Mat4& ginv, const Deriv1& dg) {
  // Gamma^m_bc = g^{mn} Gamma_{n b c}, Gamma_{nbc} = (d_c g_nb + d_b g_nc - d_n g_bc)/2
  const auto low = christoffel_first(dg);
  Christoffel4 out{};
  for (int m = 0; m < 4; ++m)
    for (int b = 0; b < 4; ++b)
      for (int c = b; c < 4; ++c) {
        double s = 0.0;
        for (int n = 0; n < 4; ++n) s += ginv[m][n] * low[n][b][c];
        out[m][b][c] = out[m][c][b] = s;
      }
  return out;
}

std::array<double, 4> gauge_F_point(const Mat4& ginv, const Deriv1& dg) {
  const auto gam = christoffel_point(ginv, dg);
  std::array<double, 4> f{};
  for (int m = 0; m < 4; ++m) f[m] = contract(ginv, gam[m]);
  return f;
}

Mat4 ricci_point(const Mat4& ginv, const Deriv1& dg, const Deriv2& ddg) {
  const auto gam = christoffel_point(ginv, dg);
  const auto low = christoffel_first(dg);
  const auto dinv = inverse_derivative(ginv, dg);
  // dgam[d][m][b][c] = d_d Gamma^m_bc
  std::array<Christoffel4, 4> dgam{};
  for (int d = 0; d < 4; ++d)
    for (int m = 0; m < 4; ++m)
      for (int b = 0; b < 4; ++b)
        for (int c = b; c < 4; ++c) {
          double s = 0.0;
          for (int n = 0; n < 4; ++n) {
            const double dlow =
                0.5 * (ddg[d][c][n][b] + ddg[d][b][n][c] - ddg[d][n][b][c]);
            s += dinv[d][m][n] * low[n][b][c] + ginv[m][n] * dlow;
          }
          dgam[d][m][b][c] = dgam[d][m][c][b] = s;
        }
  Mat4 r{};
  for (int a = 0; a < 4; ++a)
    for (int b = a; b < 4; ++b) {
      double s = 0.0;
      for (int m = 0; m < 4; ++m) {
        s += dgam[m][m][a][b] - dgam[b][m][a][m];
        for (int n = 0; n < 4; ++n) {
          s += gam[m][m][n] * gam[n][a][b] - gam[m][b][n] * gam[n][a][m];
        }
      }
      r[a][b] = r[b][a] = s;
    }
  return r;
}

Mat4 reduced_Q_point(const Mat4& ginv, const Deriv1& dg) {
  return reduced_Q_bilinear(ginv, dg, dg);
}

Mat4 reduced_Q_bilinear(const Mat4& ginv, const Deriv1& x, const Deriv1& y) {
  const auto mx = gradient_slices(x);
  const auto my = gradient_slices(y);
  const auto gx = christoffel_first(x);
  const auto gy = christoffel_first(y);
  const Mat4 t1xy = quad_form(ginv, mx, my);
  const Mat4 t2xy = quad_form(ginv, gx, gy);
  Mat4 out{};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      // quad_form(X, Y)[b][a] == quad_form(Y, X)[a][b]
      out[a][b] = 0.5 * (t1xy[a][b] + t1xy[b][a] - t2xy[a][b] - t2xy[b][a]);
    }
  return out;
}

Mat4 gauge_terms_point(const Mat4& g, const Mat4& ginv, const Deriv1& dg, const Deriv2& ddg) {
  const auto low = christoffel_first(dg);  // low[b][c][d] = Gamma_{bcd}
  const auto dinv = inverse_derivative(ginv, dg);
  const auto gam = christoffel_point(ginv, dg);
  // F_b = g^{cd} Gamma_{bcd}
  std::array<double, 4> f{};
  for (int b = 0; b < 4; ++b) f[b] = contract(ginv, low[b]);
  // dF[a][b] = d_a F_b
  Mat4 dF{};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      double s = 0.0;
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) {
          const double dlow = 0.5 * (ddg[a][d][b][c] + ddg[a][c][b][d] - ddg[a][b][c][d]);
          s += dinv[a][c][d] * low[b][c][d] + ginv[c][d] * dlow;
        }
      dF[a][b] = s;
    }
  (void)g;
  Mat4 out{};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      double s = dF[a][b] + dF[b][a];
      for (int c = 0; c < 4; ++c) s -= 2.0 * gam[c][a][b] * f[c];
      out[a][b] = s;
    }
  return out;
}

std::array<std::array<double, 4>, 4> gauge_F_gradient_point(const Mat4& ginv, const Deriv1& dg,
                                                           const Deriv2& ddg) {
  const auto low = christoffel_first(dg);
  const auto dinv = inverse_derivative(ginv, dg);
  std::array<double, 4> f{};
  for (int b = 0; b < 4; ++b) f[b] = contract(ginv, low[b]);
  std::array<std::array<double, 4>, 4> out{};
  for (int c = 0; c < 4; ++c) {
    // d_c F_b, then raise with d_c g^{mb} F_b + g^{mb} d_c F_b
    std::array<double, 4> dlowF{};
    for (int b = 0; b < 4; ++b) {
      double s = 0.0;
      for (int p = 0; p < 4; ++p)
        for (int q = 0; q < 4; ++q) {
          const double dlow = 0.5 * (ddg[c][q][b][p] + ddg[c][p][b][q] - ddg[c][b][p][q]);
          s += dinv[c][p][q] * low[b][p][q] + ginv[p][q] * dlow;
        }
      dlowF[b] = s;
    }
    for (int m = 0; m < 4; ++m) {
      double s = 0.0;
      for (int b = 0; b < 4; ++b) s += dinv[c][m][b] * f[b] + ginv[m][b] * dlowF[b];
      out[c][m] = s;
    }
  }
  return out;
}

SignatureInfo signature(const Mat4& g, double margin) {
  Eigen::Matrix4d m;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) m(a, b) = g[a][b];
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(m, Eigen::EigenvaluesOnly);
  SignatureInfo info;
  for (int i = 0; i < 4; ++i) {
    const double l = es.eigenvalues()(i);
    if (l < -margin) ++info.negative;
    if (l > margin) ++info.positive;
  }
  return info;
}

// ---- fields -----------------------------------------------------------------

MetricField MetricField::minkowski(const Grid3& grid) {
  std::array<ScalarField, kN> c;
  const Mat4 m = minkowski4();
  for (int q = 0; q < kN; ++q) c[q] = ScalarField(grid, m[kPair[q][0]][kPair[q][1]]);
  MetricField out = from_components(std::move(c));
  invert_metric(out);
  return out;
}

MetricField MetricField::from_components(std::array<ScalarField, kN> comps) {
  MetricField m;
  m.grid = comps[0].grid();
  for (const auto& f : comps) require_same_grid(f.grid(), m.grid, "metric components");
  m.g = std::move(comps);
  return m;
}

Mat4 MetricField::metric_at(std::size_t idx) const { return from_fields(g, idx); }
Mat4 MetricField::inverse_at(std::size_t idx) const { return from_fields(ginv, idx); }

void invert_metric(MetricField& m, double eps_det) {
  const Grid3& grid = m.grid;
  for (int q = 0; q < kN; ++q) {
    m.ginv[q] = ScalarField(grid);
    m.gtilde[q] = ScalarField(grid);
  }
  const long long n = static_cast<long long>(grid.size());
  // First failing point in index order, so the report is deterministic.
  long long bad = n;
  std::string why;
#pragma omp parallel for schedule(static)
  for (long long idx = 0; idx < n; ++idx) {
    const Mat4 g = m.metric_at(idx);
    double det = 0.0;
    const Mat4 inv = invert4(g, &det);
    std::string local;
    if (!(std::abs(det) > eps_det)) {
      local = "near-singular metric (det = " + std::to_string(det) + ")";
    } else {
      double res = 0.0, scale = 0.0;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          double s = 0.0;
          for (int c = 0; c < 4; ++c) s += inv[a][c] * g[c][b];
          res = std::max(res, std::abs(s - (a == b ? 1.0 : 0.0)));
          scale = std::max(scale, std::abs(g[a][b]) * std::abs(inv[a][b]));
        }
      if (res > 1e-12 * std::max(1.0, scale)) {
        local = "inverse residual " + std::to_string(res);
      } else if (!signature(g).lorentzian()) {
        local = "metric is not Lorentzian";
      } else if (!(inv[0][0] < 0.0)) {
        local = "g^00 is not negative";
      }
    }
    if (!local.empty()) {
#pragma omp critical(hgr_invert_metric)
      if (idx < bad) {
        bad = idx;
        why = local;
      }
      continue;
    }
    for (int q = 0; q < kN; ++q) {
      const double v = inv[kPair[q][0]][kPair[q][1]];
      m.ginv[q][idx] = v;
      m.gtilde[q][idx] = v / (-inv[0][0]);
    }
  }
  if (bad < n) {
    const auto x = grid.position(bad);
    std::ostringstream os;
    os << "invert_metric: " << why << " at (" << x[0] << ", " << x[1] << ", " << x[2] << ")";
    throw NumericError(os.str());
  }
}

Deriv1 MetricDerivatives::at(std::size_t idx) const {
  Deriv1 out;
  for (int c = 0; c < 4; ++c) out[c] = from_fields(d[c], idx);
  return out;
}

MetricDerivatives metric_derivatives(const MetricField& m, const std::array<ScalarField, kN>& gt,
                                     int order) {
  MetricDerivatives out;
  for (int q = 0; q < kN; ++q) {
    require_same_grid(gt[q].grid(), m.grid, "metric_derivatives");
    out.d[0][q] = gt[q];
    for (int a = 0; a < 3; ++a) out.d[a + 1][q] = derivative(m.g[q], a, order);
  }
  return out;
}

Deriv2 MetricSecondDerivatives::at(std::size_t idx) const {
  Deriv2 out;
  for (int c = 0; c < 4; ++c)
    for (int d = 0; d < 4; ++d) out[c][d] = from_fields(dd[kSym[c][d]], idx);
  return out;
}

MetricSecondDerivatives metric_second_derivatives(const MetricField& m,
                                                  const std::array<ScalarField, kN>& gt,
                                                  const std::array<ScalarField, kN>& gtt,
                                                  int order) {
  MetricSecondDerivatives out;
  for (int q = 0; q < kN; ++q) {
    out.dd[0][q] = gtt[q];
    for (int a = 0; a < 3; ++a) {
      out.dd[kSym[0][a + 1]][q] = derivative(gt[q], a, order);
      for (int b = a; b < 3; ++b) {
        out.dd[kSym[a + 1][b + 1]][q] = second_derivative(m.g[q], a, b, order);
      }
    }
  }
  return out;
}

namespace {

template <class Kernel>
void pointwise(const Grid3& grid, Kernel&& k) {
  const long long n = static_cast<long long>(grid.size());
#pragma omp parallel for schedule(static)
  for (long long idx = 0; idx < n; ++idx) k(std::size_t(idx));
}

void require_inverse(const MetricField& m, const char* what) {
  if (!m.has_inverse()) throw PreconditionError(std::string(what) + ": inverse metric not cached");
}

}  // namespace

ChristoffelField christoffel(const MetricField& m, const MetricDerivatives& dg) {
  require_inverse(m, "christoffel");
  ChristoffelField out;
  for (auto& row : out.gamma)
    for (auto& f : row) f = ScalarField(m.grid);
  pointwise(m.grid, [&](std::size_t idx) {
    const auto gam = christoffel_point(m.inverse_at(idx), dg.at(idx));
    for (int mu = 0; mu < 4; ++mu)
      for (int q = 0; q < kN; ++q) out.gamma[mu][q][idx] = gam[mu][kPair[q][0]][kPair[q][1]];
  });
  return out;
}

std::array<ScalarField, 4> gauge_F(const MetricField& m, const MetricDerivatives& dg) {
  require_inverse(m, "gauge_F");
  std::array<ScalarField, 4> out;
  for (auto& f : out) f = ScalarField(m.grid);
  pointwise(m.grid, [&](std::size_t idx) {
    const auto f = gauge_F_point(m.inverse_at(idx), dg.at(idx));
    for (int mu = 0; mu < 4; ++mu) out[mu][idx] = f[mu];
  });
  return out;
}

std::array<ScalarField, kN> ricci(const MetricField& m, const MetricDerivatives& dg,
                                  const MetricSecondDerivatives& ddg) {
  require_inverse(m, "ricci");
  std::array<ScalarField, kN> out;
  for (auto& f : out) f = ScalarField(m.grid);
  pointwise(m.grid, [&](std::size_t idx) {
    const Mat4 r = ricci_point(m.inverse_at(idx), dg.at(idx), ddg.at(idx));
    for (int q = 0; q < kN; ++q) out[q][idx] = r[kPair[q][0]][kPair[q][1]];
  });
  return out;
}

std::array<ScalarField, kN> reduced_rhs_Q(const MetricField& m, const MetricDerivatives& dg) {
  require_inverse(m, "reduced_rhs_Q");
  std::array<ScalarField, kN> out;
  for (auto& f : out) f = ScalarField(m.grid);
  pointwise(m.grid, [&](std::size_t idx) {
    const Mat4 q = reduced_Q_point(m.inverse_at(idx), dg.at(idx));
    for (int c = 0; c < kN; ++c) out[c][idx] = q[kPair[c][0]][kPair[c][1]];
  });
  return out;
}

}  // namespace hgr
