#include "hgr/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hgr/error.hpp"

namespace hgr {

Grid3::Grid3(int n_per_axis, double half_width_) : n(n_per_axis), half_width(half_width_) {
  if (n < 4 || (n & (n - 1)) != 0) {
    throw PreconditionError("grid: n_per_axis must be a power of two >= 4, got " +
                            std::to_string(n));
  }
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw PreconditionError("grid: half_width must be positive and finite");
  }
}

double Grid3::cell_volume() const {
  const double h = spacing();
  return h * h * h;
}

std::array<int, 3> Grid3::ijk(std::size_t idx) const {
  const int k = int(idx % n);
  idx /= n;
  const int j = int(idx % n);
  const int i = int(idx / n);
  return {i, j, k};
}

std::array<double, 3> Grid3::position(std::size_t idx) const {
  const auto [i, j, k] = ijk(idx);
  return {coord(i), coord(j), coord(k)};
}

double Grid3::radius(std::size_t idx) const {
  const auto x = position(idx);
  return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
}

int Grid3::boundary_distance(std::size_t idx) const {
  // The seam lies between index n-1 and index 0 (x = -L is identified with x = L).
  const auto p = ijk(idx);
  int d = n;
  for (int c : p) d = std::min({d, c, n - 1 - c});
  return d;
}

ScalarField::ScalarField(const Grid3& grid, double value)
    : grid_(grid), v_(grid.size(), value) {}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  require_same_grid(grid_, o.grid_, "field +=");
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
  require_same_grid(grid_, o.grid_, "field -=");
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
  return *this;
}

ScalarField& ScalarField::operator*=(double a) {
  for (double& x : v_) x *= a;
  return *this;
}

ScalarField& ScalarField::axpy(double a, const ScalarField& o) {
  require_same_grid(grid_, o.grid_, "field axpy");
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += a * o.v_[i];
  return *this;
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double x : v_) m = std::max(m, std::abs(x));
  return m;
}

bool ScalarField::is_finite() const {
  return std::all_of(v_.begin(), v_.end(), [](double x) { return std::isfinite(x); });
}

bool ScalarField::is_zero() const {
  return std::all_of(v_.begin(), v_.end(), [](double x) { return x == 0.0; });
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

ScalarField multiply(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid(), "multiply");
  ScalarField out(a.grid());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

double integrate_product(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid(), "integrate_product");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s * a.grid().cell_volume();
}

double l2_norm(const ScalarField& u) { return std::sqrt(integrate_product(u, u)); }

int support_margin(const ScalarField& u, double rel_tol) {
  const double thresh = rel_tol * u.max_abs();
  const Grid3& g = u.grid();
  int margin = g.n;
  if (u.max_abs() == 0.0) return margin;
  for (std::size_t idx = 0; idx < u.size(); ++idx) {
    if (std::abs(u[idx]) > thresh) margin = std::min(margin, g.boundary_distance(idx));
  }
  return margin;
}

void require_support_margin(const ScalarField& u, const SupportPolicy& policy,
                            std::string_view what) {
  if (!policy.enforce) return;
  const int m = support_margin(u, policy.rel_tol);
  if (m < policy.margin_cells) {
    std::ostringstream os;
    os << what << ": support comes within " << m << " cells of the box boundary (need "
       << policy.margin_cells << ")";
    throw PreconditionError(os.str());
  }
}

void require_same_grid(const Grid3& a, const Grid3& b, std::string_view what) {
  if (!(a == b)) throw PreconditionError(std::string(what) + ": fields live on different grids");
}

}  // namespace hgr
