#pragma once

#include <cmath>
#include <random>

#include "hgr/grid.hpp"

namespace hgr::test {

inline constexpr double kPi = 3.14159265358979323846;

/// (1 - r^2/R^2)^p inside the ball of radius R around c.
inline ScalarField bump(const Grid3& g, double R, int p = 6, double cx = 0.0, double cy = 0.0,
                        double cz = 0.0) {
  return ScalarField::from_function(g, [&](double x, double y, double z) {
    const double d2 = ((x - cx) * (x - cx) + (y - cy) * (y - cy) + (z - cz) * (z - cz)) / (R * R);
    return d2 < 1.0 ? std::pow(1.0 - d2, p) : 0.0;
  });
}

inline double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace hgr::test
