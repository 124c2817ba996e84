#pragma once

#include <array>
#include <cstddef>

#include "hgr/grid.hpp"

namespace hgr {

/// Periodic index arithmetic around one grid point; offsets up to 3 cells.
class Neighbors {
 public:
  Neighbors(const Grid3& grid, std::size_t idx);

  std::size_t center() const { return c_; }
  std::size_t at(int axis, int offset) const { return std::size_t(c_ + off_[axis][offset + 3]); }
  std::size_t at(int a, int oa, int b, int ob) const {
    return std::size_t(c_ + off_[a][oa + 3] + off_[b][ob + 3]);
  }

 private:
  std::ptrdiff_t c_;
  std::array<std::array<std::ptrdiff_t, 7>, 3> off_;
};

/// Centered first derivative along axis, order 2 or 4.
double d1(const double* f, const Neighbors& nb, int axis, double h, int order = 4);
/// Centered second derivative d_a d_b, order 2 or 4. Mixed derivatives use
/// the tensor product of the one-dimensional first-derivative stencils.
double d2(const double* f, const Neighbors& nb, int a, int b, double h, int order = 4);

ScalarField derivative(const ScalarField& u, int axis, int order = 4);
ScalarField second_derivative(const ScalarField& u, int a, int b, int order = 4);

/// Centered 7-point (order 2) or 13-point (order 4) Laplacian.
ScalarField laplacian(const ScalarField& u, int order = 4);

}  // namespace hgr
