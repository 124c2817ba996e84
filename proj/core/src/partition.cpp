#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hgr/error.hpp"
#include "hgr/finite_difference.hpp"
#include "hgr/sobolev.hpp"

namespace hgr {
namespace {

double s7_d1(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double u = t * (1.0 - t);
  return 140.0 * u * u * u;
}

double s7_d2(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double u = t * (1.0 - t);
  return 420.0 * u * u * (1.0 - 2.0 * t);
}

// Profile as a function of l = log2 r for the two transition shapes:
// rising S(l - a) and falling S(b - l). value/d1/d2 are r-derivatives.
struct Radial {
  double value, d1, d2;
};

Radial rising(double r, double a) {
  const double t = std::log2(r) - a;
  const double ln2 = std::numbers::ln2;
  return {smoothstep7(t), s7_d1(t) / (r * ln2),
          s7_d2(t) / (r * r * ln2 * ln2) - s7_d1(t) / (r * r * ln2)};
}

Radial falling(double r, double b) {
  const double t = b - std::log2(r);
  const double ln2 = std::numbers::ln2;
  return {smoothstep7(t), -s7_d1(t) / (r * ln2),
          s7_d2(t) / (r * r * ln2 * ln2) + s7_d1(t) / (r * r * ln2)};
}

Radial chi_all(double r) {
  if (r <= 1.0 / 16 || r >= 8.0) return {0.0, 0.0, 0.0};
  if (r < 1.0 / 8) return rising(r, -4.0);
  if (r <= 4.0) return {1.0, 0.0, 0.0};
  return falling(r, 3.0);
}

Radial psi_all(int j, double r) {
  if (j == 0) {
    if (r <= 4.0) return {1.0, 0.0, 0.0};
    if (r >= 8.0) return {0.0, 0.0, 0.0};
    return falling(r, 3.0);
  }
  const double sc = std::ldexp(1.0, -j);
  const Radial c = chi_all(sc * r);
  return {c.value, sc * c.d1, sc * sc * c.d2};
}

// j-independent bounds on |D psi| and |D^2 psi| (componentwise) for the
// rescaled profile, sampled densely in log r.
std::array<double, 2> profile_derivative_bounds() {
  std::array<double, 2> c{0.0, 0.0};
  const int samples = 200000;
  for (int pass = 0; pass < 2; ++pass) {
    const int j = pass == 0 ? 0 : 1;
    const double scale = std::ldexp(1.0, j);
    // psi_1 covers r in (1/8, 16); psi_0 covers (4, 8).
    const double lo = std::log2((pass == 0 ? 4.0 : 1.0 / 8));
    const double hi = std::log2((pass == 0 ? 8.0 : 16.0));
    for (int i = 0; i <= samples; ++i) {
      const double r = std::exp2(lo + (hi - lo) * i / samples);
      const Radial p = psi_all(j, r);
      c[0] = std::max(c[0], scale * std::abs(p.d1));
      c[1] = std::max(c[1], scale * scale * (std::abs(p.d2) + std::abs(p.d1) / r));
    }
  }
  return c;
}

}  // namespace

double smoothstep7(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double t4 = t * t * t * t;
  return t4 * (35.0 + t * (-84.0 + t * (70.0 - 20.0 * t)));
}

double chi_profile(double r) { return chi_all(r).value; }
double psi_radial(int j, double r) { return psi_all(j, r).value; }
double psi_radial_d1(int j, double r) { return psi_all(j, r).d1; }
double psi_radial_d2(int j, double r) { return psi_all(j, r).d2; }

bool DyadicPartition::active(int j) const {
  return j >= 0 && j <= j_max && !psi[j].is_zero();
}

int default_j_max(const Grid3& grid) {
  // Corner of the box sits at sqrt(3) L; psi_j reaches out to 2^{j+2} on its plateau.
  const double corner = std::sqrt(3.0) * grid.half_width;
  int j = 1;
  while (std::ldexp(1.0, j + 2) < corner) ++j;
  return j;
}

DyadicPartition build_partition(const Grid3& grid, int j_max) {
  if (j_max < 1) throw PreconditionError("build_partition: j_max must be >= 1");
  if (std::ldexp(1.0, j_max + 3) < grid.half_width) {
    throw PreconditionError("build_partition: 2^(j_max+3) must be >= L to cover the box");
  }
  DyadicPartition p;
  p.grid = grid;
  p.j_max = j_max;
  p.psi.reserve(j_max + 1);
  for (int j = 0; j <= j_max; ++j) {
    ScalarField f(grid);
    for (std::size_t idx = 0; idx < grid.size(); ++idx) f[idx] = psi_radial(j, grid.radius(idx));
    p.psi.push_back(std::move(f));
  }
  ScalarField total(grid);
  for (const auto& f : p.psi) total += f;
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    if (total[idx] < 1.0) {
      const auto x = grid.position(idx);
      std::ostringstream os;
      os << "build_partition: point (" << x[0] << ", " << x[1] << ", " << x[2]
         << ") not covered (sum psi_j = " << total[idx] << ")";
      throw PreconditionError(os.str());
    }
  }
  for (const auto& f : p.psi) {
    ScalarField c(grid);
    for (std::size_t idx = 0; idx < grid.size(); ++idx) c[idx] = f[idx] / total[idx];
    p.psi_caps.push_back(std::move(c));
  }
  return p;
}

PartitionCheck check_partition(const DyadicPartition& p) {
  PartitionCheck out;
  const Grid3& g = p.grid;
  auto fail = [&](bool& flag, const std::string& why) {
    if (flag && out.first_failure.empty()) out.first_failure = why;
    flag = false;
  };

  for (int j = 0; j <= p.j_max; ++j) {
    const double plateau_lo = j == 0 ? 0.0 : std::ldexp(1.0, j - 3);
    const double plateau_hi = std::ldexp(1.0, j + 2);
    const double supp_lo = j == 0 ? -1.0 : std::ldexp(1.0, j - 4);
    const double supp_hi = std::ldexp(1.0, j + 3);
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
      const double r = g.radius(idx);
      const double v = p.psi[j][idx];
      if (r >= plateau_lo && r <= plateau_hi && v != 1.0) {
        fail(out.plateau, "psi_" + std::to_string(j) + " != 1 on its plateau at r = " +
                              std::to_string(r));
      }
      if ((r <= supp_lo || r >= supp_hi) && v != 0.0) {
        fail(out.support, "psi_" + std::to_string(j) + " != 0 outside its annulus at r = " +
                              std::to_string(r));
      }
    }
  }

  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    double s = 0.0;
    for (const auto& c : p.psi_caps) s += c[idx];
    out.max_sum_error = std::max(out.max_sum_error, std::abs(s - 1.0));
  }
  if (out.max_sum_error > 1e-14) fail(out.sums_to_one, "sum of Psi_k deviates from 1");

  // Difference quotients of a C^2 function are averages of its derivatives:
  // the fourth-order first-derivative stencil is bounded by 5/3 sup|f'| and
  // its tensor products by (5/3)^2 sup|D^2 f|.
  const auto bounds = profile_derivative_bounds();
  out.derivative_bound_value = {5.0 / 3.0 * bounds[0], 25.0 / 9.0 * bounds[1]};
  // Only points whose stencil stays inside the box: the periodic wrap across
  // the seam is not part of the partition on R^3.
  auto interior_max = [&](const ScalarField& f) {
    double m = 0.0;
    for (std::size_t idx = 0; idx < g.size(); ++idx)
      if (g.boundary_distance(idx) >= 2) m = std::max(m, std::abs(f[idx]));
    return m;
  };
  for (int j = 0; j <= p.j_max; ++j) {
    if (p.psi[j].is_zero()) continue;
    const double s1 = std::ldexp(1.0, j);
    for (int a = 0; a < 3; ++a) {
      out.scaled_derivative[0] =
          std::max(out.scaled_derivative[0], s1 * interior_max(derivative(p.psi[j], a)));
      for (int b = a; b < 3; ++b) {
        out.scaled_derivative[1] = std::max(
            out.scaled_derivative[1], s1 * s1 * interior_max(second_derivative(p.psi[j], a, b)));
      }
    }
  }
  for (int q = 0; q < 2; ++q) {
    if (out.scaled_derivative[q] > out.derivative_bound_value[q]) {
      fail(out.derivative_bound, "scaled derivative of order " + std::to_string(q + 1) +
                                     " exceeds its j-independent bound");
    }
  }

  for (int k = 0; k <= p.j_max; ++k) {
    for (int j = 0; j <= p.j_max; ++j) {
      bool nonzero = false;
      for (std::size_t idx = 0; idx < g.size() && !nonzero; ++idx) {
        nonzero = p.psi_caps[k][idx] * p.psi[j][idx] != 0.0;
      }
      if (!nonzero) continue;
      if (k < j - 3 || k > j + 4) {
        out.stated_window_violations.push_back({k, j});
        fail(out.overlap_stated, "Psi_" + std::to_string(k) + " psi_" + std::to_string(j) +
                                     " != 0 outside k in {j-3..j+4}");
      }
      if (std::abs(k - j) > 6) {
        fail(out.overlap_support, "Psi_" + std::to_string(k) + " psi_" + std::to_string(j) +
                                      " != 0 with |k-j| > 6");
      }
    }
  }
  return out;
}

}  // namespace hgr
