#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace hgr {

/// Uniform periodic grid on the box [-L, L)^3 with n points per axis.
/// Point i sits at x_i = -L + i*dx, so the origin is a grid point.
struct Grid3 {
  int n = 0;
  double half_width = 0.0;

  Grid3() = default;
  Grid3(int n_per_axis, double half_width);

  double spacing() const { return 2.0 * half_width / n; }
  double cell_volume() const;
  std::size_t size() const { return std::size_t(n) * n * n; }
  double coord(int i) const { return -half_width + i * spacing(); }
  std::size_t index(int i, int j, int k) const {
    return (std::size_t(i) * n + j) * n + k;
  }
  std::array<int, 3> ijk(std::size_t idx) const;
  std::array<double, 3> position(std::size_t idx) const;
  double radius(std::size_t idx) const;
  /// Distance in cells from the point to the periodic seam of the box.
  int boundary_distance(std::size_t idx) const;

  bool operator==(const Grid3&) const = default;
};

/// Real scalar function sampled on a Grid3.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const Grid3& grid, double value = 0.0);

  template <class F>
  static ScalarField from_function(const Grid3& grid, F&& f) {
    ScalarField u(grid);
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
      const auto x = grid.position(idx);
      u.v_[idx] = f(x[0], x[1], x[2]);
    }
    return u;
  }

  const Grid3& grid() const { return grid_; }
  std::size_t size() const { return v_.size(); }
  std::span<double> values() { return v_; }
  std::span<const double> values() const { return v_; }
  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }
  double& operator[](std::size_t idx) { return v_[idx]; }
  double operator[](std::size_t idx) const { return v_[idx]; }
  double& at(int i, int j, int k) { return v_[grid_.index(i, j, k)]; }
  double at(int i, int j, int k) const { return v_[grid_.index(i, j, k)]; }

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(double a);
  /// this += a * o
  ScalarField& axpy(double a, const ScalarField& o);

  double max_abs() const;
  bool is_finite() const;
  bool is_zero() const;

 private:
  Grid3 grid_;
  std::vector<double> v_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);
/// Pointwise product.
ScalarField multiply(const ScalarField& a, const ScalarField& b);

/// Midpoint quadrature of u*v over the box.
double integrate_product(const ScalarField& a, const ScalarField& b);
double l2_norm(const ScalarField& u);

/// Values with |u| <= rel_tol * max|u| count as zero for support checks.
struct SupportPolicy {
  int margin_cells = 8;
  double rel_tol = 1e-10;
  bool enforce = true;
};

/// Smallest boundary distance over points where u is (relatively) nonzero;
/// returns n for the zero field.
int support_margin(const ScalarField& u, double rel_tol = 1e-10);

/// Throws PreconditionError if the support of u comes closer than
/// policy.margin_cells to the box seam.
void require_support_margin(const ScalarField& u, const SupportPolicy& policy,
                            std::string_view what);

void require_same_grid(const Grid3& a, const Grid3& b, std::string_view what);

}  // namespace hgr
