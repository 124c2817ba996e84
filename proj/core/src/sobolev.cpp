#include "hgr/sobolev.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "hgr/error.hpp"
#include "hgr/finite_difference.hpp"
#include "hgr/spectral.hpp"

namespace hgr {
namespace {

ScalarField cutoff_power(const ScalarField& psi, double gamma) {
  ScalarField out(psi.grid());
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double v = psi[i];
    out[i] = gamma == 1.0 ? v : (gamma == 2.0 ? v * v : std::pow(v, gamma));
  }
  return out;
}

void check_params(const DyadicPartition& p, const Grid3& g, double s) {
  if (s < 0.0) throw PreconditionError("weighted norm: s must be nonnegative");
  require_same_grid(p.grid, g, "weighted norm");
}

ScalarField weight_power(const Grid3& g, double power) {
  ScalarField w(g);
  for (std::size_t idx = 0; idx < g.size(); ++idx) w[idx] = std::pow(1.0 + g.radius(idx), power);
  return w;
}

// Ordered sum over j of per-j contributions, evaluated in parallel.
template <class Term>
double dyadic_sum(const DyadicPartition& p, Term&& term) {
  std::vector<double> terms(p.j_max + 1, 0.0);
#pragma omp parallel for schedule(dynamic)
  for (int j = 0; j <= p.j_max; ++j) {
    if (!p.psi[j].is_zero()) terms[j] = term(j);
  }
  double s = 0.0;
  for (double t : terms) s += t;
  return s;
}

double sum_components(const std::vector<ScalarField>& a, const std::vector<ScalarField>& b,
                      const DyadicPartition& p, const NormParams& params,
                      const SupportPolicy& policy) {
  double s = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) s += inner_hsd(a[c], b[c], p, params, policy);
  return s;
}

double weighted_sum(const std::vector<ScalarField>& a, const std::vector<ScalarField>& b,
                    const ScalarField& w) {
  double s = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) s += integrate_product(multiply(w, a[c]), b[c]);
  return s;
}

// sum_{a,b,c} int w G^{ab} x_{a,c} y_{b,c}
double a33_pair(const std::vector<ScalarField>& x, const std::vector<ScalarField>& y,
                const A33Field& a33, const ScalarField* w) {
  const Grid3& g = a33.grid();
  const int n = int(x.size()) / 3;
  double s = 0.0;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    double local = 0.0;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        const double gab = a33.at(idx, a, b);
        if (gab == 0.0) continue;
        double acc = 0.0;
        for (int c = 0; c < n; ++c) acc += x[n * a + c][idx] * y[n * b + c][idx];
        local += gab * acc;
      }
    }
    s += w ? (*w)[idx] * local : local;
  }
  return s * g.cell_volume();
}

void check_shapes(const ProductState& a, const ProductState& b) {
  a.validate();
  b.validate();
  if (a.components() != b.components()) throw PreconditionError("product state: N mismatch");
  require_same_grid(a.grid(), b.grid(), "product state");
}

}  // namespace

std::vector<double> hsd_terms(const ScalarField& u, const DyadicPartition& p,
                              const NormParams& params, const SupportPolicy& policy) {
  check_params(p, u.grid(), params.s);
  require_support_margin(u, policy, "norm_hsd");
  std::vector<double> terms(p.j_max + 1, 0.0);
#pragma omp parallel for schedule(dynamic)
  for (int j = 0; j <= p.j_max; ++j) {
    if (p.psi[j].is_zero()) continue;
    const ScalarField f = multiply(cutoff_power(p.psi[j], params.gamma), u);
    if (f.is_zero()) continue;
    terms[j] = std::exp2(2.0 * params.delta * j) * bessel_energy(f, params.s, std::exp2(j));
  }
  return terms;
}

double inner_hsd(const ScalarField& u, const ScalarField& v, const DyadicPartition& p,
                 const NormParams& params, const SupportPolicy& policy) {
  check_params(p, u.grid(), params.s);
  require_same_grid(u.grid(), v.grid(), "inner_hsd");
  require_support_margin(u, policy, "inner_hsd");
  require_support_margin(v, policy, "inner_hsd");
  if (u.is_zero() || v.is_zero()) return 0.0;
  return dyadic_sum(p, [&](int j) {
    const ScalarField cut = cutoff_power(p.psi[j], params.gamma);
    const ScalarField f = multiply(cut, u);
    const ScalarField h = multiply(cut, v);
    return std::exp2(2.0 * params.delta * j) * bessel_energy(f, h, params.s, std::exp2(j));
  });
}

double norm_hsd(const ScalarField& u, const DyadicPartition& p, const NormParams& params,
                const SupportPolicy& policy) {
  double s = 0.0;
  for (double t : hsd_terms(u, p, params, policy)) s += t;
  return std::sqrt(s);
}

double norm_weighted_integer(const ScalarField& u, int m, double delta) {
  if (m < 0 || m > 2) throw PreconditionError("norm_weighted_integer: m must be 0, 1 or 2");
  const Grid3& g = u.grid();
  double sum = integrate_product(multiply(weight_power(g, 2.0 * delta), u), u);
  if (m >= 1) {
    const ScalarField w = weight_power(g, 2.0 * (delta + 1.0));
    for (int a = 0; a < 3; ++a) {
      const ScalarField d = derivative(u, a);
      sum += integrate_product(multiply(w, d), d);
    }
  }
  if (m >= 2) {
    const ScalarField w = weight_power(g, 2.0 * (delta + 2.0));
    for (int a = 0; a < 3; ++a) {
      for (int b = a; b < 3; ++b) {
        const ScalarField d = second_derivative(u, a, b);
        sum += integrate_product(multiply(w, d), d);
      }
    }
  }
  return std::sqrt(sum);
}

double norm_cmb(const ScalarField& u, int m, double beta) {
  if (m < 0 || m > 2) throw PreconditionError("norm_cmb: m must be 0, 1 or 2");
  const Grid3& g = u.grid();
  auto weighted_sup = [&](const ScalarField& f, double power) {
    double s = 0.0;
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
      s = std::max(s, std::pow(1.0 + g.radius(idx), power) * std::abs(f[idx]));
    }
    return s;
  };
  double total = weighted_sup(u, beta);
  if (m >= 1) {
    for (int a = 0; a < 3; ++a) total += weighted_sup(derivative(u, a), beta + 1.0);
  }
  if (m >= 2) {
    for (int a = 0; a < 3; ++a) {
      for (int b = a; b < 3; ++b) total += weighted_sup(second_derivative(u, a, b), beta + 2.0);
    }
  }
  return total;
}

double norm_l2_weighted(const ScalarField& u, double delta) {
  return std::sqrt(integrate_product(multiply(weight_power(u.grid(), 2.0 * delta), u), u));
}

ProductState ProductState::zeros(const Grid3& grid, int n_components) {
  ProductState v;
  v.v1.assign(n_components, ScalarField(grid));
  v.v2.assign(n_components, ScalarField(grid));
  v.v3.assign(3 * n_components, ScalarField(grid));
  return v;
}

void ProductState::validate() const {
  const std::size_t n = v1.size();
  if (n == 0 || v2.size() != n || v3.size() != 3 * n) {
    throw PreconditionError("product state: component counts must be N, N, 3N");
  }
  for (const auto* block : {&v1, &v2, &v3}) {
    for (const auto& f : *block) require_same_grid(f.grid(), v1.front().grid(), "product state");
  }
}

A33Field A33Field::identity(const Grid3& grid) { return scaled_identity(grid, 1.0); }

A33Field A33Field::scaled_identity(const Grid3& grid, double factor) {
  A33Field a;
  for (int q = 0; q < 6; ++q) {
    const bool diag = q == 0 || q == 3 || q == 5;
    a.g[q] = ScalarField(grid, diag ? factor : 0.0);
  }
  return a;
}

double A33Field::at(std::size_t idx, int a, int b) const {
  static constexpr int slot[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
  return g[slot[a][b]][idx];
}

double a33_c0(const A33Field& a33) {
  const Grid3& g = a33.grid();
  double c0 = 1.0;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    Eigen::Matrix3d m;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) m(a, b) = a33.at(idx, a, b);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues()(0);
    const double hi = es.eigenvalues()(2);
    if (!(lo > 0.0)) {
      const auto x = g.position(idx);
      std::ostringstream os;
      os << "a33 not positive definite at (" << x[0] << ", " << x[1] << ", " << x[2]
         << "), smallest eigenvalue " << lo;
      throw PreconditionError(os.str());
    }
    c0 = std::max({c0, hi, 1.0 / lo});
  }
  return c0;
}

double norm_X(const ProductState& V, const DyadicPartition& p, double s, double delta,
              const SupportPolicy& policy) {
  V.validate();
  const NormParams p1{s, delta, 2.0, 0, 0.0};
  const NormParams p2{s, delta + 1.0, 2.0, 0, 0.0};
  double sum = 0.0;
  for (const auto& f : V.v1) sum += std::pow(norm_hsd(f, p, p1, policy), 2);
  for (const auto& f : V.v2) sum += std::pow(norm_hsd(f, p, p2, policy), 2);
  for (const auto& f : V.v3) sum += std::pow(norm_hsd(f, p, p2, policy), 2);
  return std::sqrt(sum);
}

double inner_X_A0(const ProductState& V, const ProductState& Phi, const A33Field& a33,
                  const DyadicPartition& p, double s, double delta,
                  const SupportPolicy& policy) {
  check_shapes(V, Phi);
  require_same_grid(a33.grid(), V.grid(), "inner_X_A0");
  a33_c0(a33);
  const NormParams p1{s, delta, 2.0, 0, 0.0};
  const NormParams p2{s, delta + 1.0, 2.0, 0, 0.0};
  double sum = sum_components(V.v1, Phi.v1, p, p1, policy);
  sum += sum_components(V.v2, Phi.v2, p, p2, policy);
  for (const auto& f : V.v3) require_support_margin(f, policy, "inner_X_A0");
  for (const auto& f : Phi.v3) require_support_margin(f, policy, "inner_X_A0");
  // Dilation moves onto the symbol; a33 is then sampled at the original point.
  sum += dyadic_sum(p, [&](int j) {
    const ScalarField cut = cutoff_power(p.psi[j], 2.0);
    const double lambda = std::exp2(j);
    std::vector<ScalarField> x, y;
    x.reserve(V.v3.size());
    y.reserve(V.v3.size());
    for (std::size_t c = 0; c < V.v3.size(); ++c) {
      x.push_back(apply_bessel_multiplier(multiply(cut, V.v3[c]), s, lambda));
      y.push_back(apply_bessel_multiplier(multiply(cut, Phi.v3[c]), s, lambda));
    }
    return std::exp2(2.0 * (delta + 1.0) * j) * a33_pair(x, y, a33, nullptr);
  });
  return sum;
}

double norm_Y(const ProductState& V, double delta) {
  V.validate();
  const Grid3& g = V.grid();
  const ScalarField w1 = weight_power(g, 2.0 * delta);
  const ScalarField w2 = weight_power(g, 2.0 * delta + 2.0);
  return std::sqrt(weighted_sum(V.v1, V.v1, w1) + weighted_sum(V.v2, V.v2, w2) +
                   weighted_sum(V.v3, V.v3, w2));
}

double inner_Y_a33(const ProductState& V, const ProductState& Phi, const A33Field& a33,
                   double delta) {
  check_shapes(V, Phi);
  require_same_grid(a33.grid(), V.grid(), "inner_Y_a33");
  a33_c0(a33);
  const Grid3& g = V.grid();
  const ScalarField w1 = weight_power(g, 2.0 * delta);
  const ScalarField w2 = weight_power(g, 2.0 * delta + 2.0);
  return weighted_sum(V.v1, Phi.v1, w1) + weighted_sum(V.v2, Phi.v2, w2) +
         a33_pair(V.v3, Phi.v3, a33, &w2);
}

}  // namespace hgr
