#include "hgr/finite_difference.hpp"

#include "hgr/error.hpp"

namespace hgr {
namespace {

void check_order(int order) {
  if (order != 2 && order != 4) throw PreconditionError("finite difference order must be 2 or 4");
}

}  // namespace

Neighbors::Neighbors(const Grid3& grid, std::size_t idx) : c_(std::ptrdiff_t(idx)) {
  const auto p = grid.ijk(idx);
  const std::ptrdiff_t n = grid.n;
  const std::ptrdiff_t stride[3] = {n * n, n, 1};
  for (int a = 0; a < 3; ++a)
    for (int o = -3; o <= 3; ++o) {
      const std::ptrdiff_t q = ((p[a] + o) % n + n) % n;
      off_[a][o + 3] = (q - p[a]) * stride[a];
    }
}

// Stencils are written in differenced form so constants are annihilated
// exactly (keeps compact support free of round-off tails).
double d1(const double* f, const Neighbors& nb, int axis, double h, int order) {
  const double p1 = f[nb.at(axis, 1)] - f[nb.at(axis, -1)];
  if (order == 2) return 0.5 * p1 / h;
  const double p2 = f[nb.at(axis, 2)] - f[nb.at(axis, -2)];
  return (8.0 * p1 - p2) / (12.0 * h);
}

double d2(const double* f, const Neighbors& nb, int a, int b, double h, int order) {
  if (a == b) {
    const double f0 = f[nb.at(a, 0)];
    const double s1 = (f[nb.at(a, 1)] - f0) + (f[nb.at(a, -1)] - f0);
    if (order == 2) return s1 / (h * h);
    const double s2 = (f[nb.at(a, 2)] - f0) + (f[nb.at(a, -2)] - f0);
    return (16.0 * s1 - s2) / (12.0 * h * h);
  }
  // tensor product of first-derivative stencils
  auto inner = [&](int oa) {
    const double p1 = f[nb.at(a, oa, b, 1)] - f[nb.at(a, oa, b, -1)];
    if (order == 2) return 0.5 * p1;
    const double p2 = f[nb.at(a, oa, b, 2)] - f[nb.at(a, oa, b, -2)];
    return (8.0 * p1 - p2) / 12.0;
  };
  const double q1 = inner(1) - inner(-1);
  if (order == 2) return 0.5 * q1 / (h * h);
  const double q2 = inner(2) - inner(-2);
  return (8.0 * q1 - q2) / (12.0 * h * h);
}

ScalarField derivative(const ScalarField& u, int axis, int order) {
  check_order(order);
  const Grid3& g = u.grid();
  ScalarField out(g);
  const double h = g.spacing();
  const long long n = static_cast<long long>(g.size());
#pragma omp parallel for schedule(static)
  for (long long idx = 0; idx < n; ++idx) {
    out[idx] = d1(u.data(), Neighbors(g, idx), axis, h, order);
  }
  return out;
}

ScalarField second_derivative(const ScalarField& u, int a, int b, int order) {
  check_order(order);
  const Grid3& g = u.grid();
  ScalarField out(g);
  const double h = g.spacing();
  const long long n = static_cast<long long>(g.size());
#pragma omp parallel for schedule(static)
  for (long long idx = 0; idx < n; ++idx) {
    out[idx] = d2(u.data(), Neighbors(g, idx), a, b, h, order);
  }
  return out;
}

ScalarField laplacian(const ScalarField& u, int order) {
  check_order(order);
  const Grid3& g = u.grid();
  ScalarField out(g);
  const double h = g.spacing();
  const long long n = static_cast<long long>(g.size());
#pragma omp parallel for schedule(static)
  for (long long idx = 0; idx < n; ++idx) {
    const Neighbors nb(g, idx);
    double s = 0.0;
    for (int a = 0; a < 3; ++a) s += d2(u.data(), nb, a, a, h, order);
    out[idx] = s;
  }
  return out;
}

}  // namespace hgr
