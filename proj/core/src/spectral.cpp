#include "hgr/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <tuple>
#include <vector>

#include "hgr/error.hpp"

namespace hgr {
namespace {

// FFTW planning is not thread safe; execution with the new-array interface is.
// Plans are created once per size and shared.
struct Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

const Plans& plans_for(int n) {
  static std::map<int, Plans> cache;
  std::lock_guard lock(plan_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  const std::size_t nr = std::size_t(n) * n * n;
  const std::size_t nc = std::size_t(n) * n * (n / 2 + 1);
  double* r = fftw_alloc_real(nr);
  fftw_complex* c = fftw_alloc_complex(nc);
  Plans p;
  p.forward = fftw_plan_dft_r2c_3d(n, n, n, r, c, FFTW_ESTIMATE);
  p.backward = fftw_plan_dft_c2r_3d(n, n, n, c, r, FFTW_ESTIMATE);
  fftw_free(r);
  fftw_free(c);
  if (!p.forward || !p.backward) throw NumericError("fft: plan creation failed");
  return cache.emplace(n, p).first->second;
}

struct RealBuffer {
  explicit RealBuffer(std::size_t n) : p(fftw_alloc_real(n)) {}
  ~RealBuffer() { fftw_free(p); }
  double* p;
};

struct ComplexBuffer {
  explicit ComplexBuffer(std::size_t n) : p(fftw_alloc_complex(n)) {}
  ~ComplexBuffer() { fftw_free(p); }
  fftw_complex* p;
};

// Squared wave number per axis index for the r2c layout.
std::vector<double> wave_numbers_sq(const Grid3& g) {
  std::vector<double> k2(g.n);
  const double dk = std::numbers::pi / g.half_width;
  for (int m = 0; m < g.n; ++m) {
    const int mm = m <= g.n / 2 ? m : m - g.n;
    k2[m] = (dk * mm) * (dk * mm);
  }
  return k2;
}

// Symbol tables (1 + lambda^2 |xi|^2)^{power} over the half spectrum. Norm
// evaluations reuse the same handful of (s, lambda) pairs many times.
using Table = std::shared_ptr<const std::vector<double>>;

Table symbol_table(const Grid3& g, double power, double lambda) {
  using Key = std::tuple<int, double, double, double>;
  static std::map<Key, Table> cache;
  static std::mutex m;
  const Key key{g.n, g.half_width, power, lambda};
  {
    std::lock_guard lock(m);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  const int n = g.n;
  const int nh = n / 2 + 1;
  const auto k2 = wave_numbers_sq(g);
  auto t = std::make_shared<std::vector<double>>(std::size_t(n) * n * nh);
  const double l2 = lambda * lambda;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < nh; ++k)
        (*t)[(std::size_t(i) * n + j) * nh + k] =
            std::pow(1.0 + l2 * (k2[i] + k2[j] + k2[k]), power);
  std::lock_guard lock(m);
  if (cache.size() >= 96) cache.clear();
  return cache.emplace(key, std::move(t)).first->second;
}

void forward(const ScalarField& u, fftw_complex* out) {
  const Grid3& g = u.grid();
  RealBuffer in(g.size());
  std::copy(u.data(), u.data() + g.size(), in.p);
  fftw_execute_dft_r2c(plans_for(g.n).forward, in.p, out);
}

}  // namespace

ScalarField apply_bessel_multiplier(const ScalarField& u, double s, double lambda) {
  const Grid3& g = u.grid();
  if (s == 0.0) return u;
  const int n = g.n;
  const int nh = n / 2 + 1;
  ComplexBuffer c(std::size_t(n) * n * nh);
  forward(u, c.p);
  const Table t = symbol_table(g, 0.5 * s, lambda);
  const double norm = 1.0 / double(g.size());
  const std::size_t nc = std::size_t(n) * n * nh;
  for (std::size_t q = 0; q < nc; ++q) {
    const double w = (*t)[q] * norm;
    c.p[q][0] *= w;
    c.p[q][1] *= w;
  }
  ScalarField out(g);
  RealBuffer r(g.size());
  fftw_execute_dft_c2r(plans_for(n).backward, c.p, r.p);
  std::copy(r.p, r.p + g.size(), out.data());
  return out;
}

ScalarField lambda_s(const ScalarField& u, double s, const SupportPolicy& policy) {
  if (s < 0.0) throw PreconditionError("lambda_s: s must be nonnegative");
  require_support_margin(u, policy, "lambda_s");
  return apply_bessel_multiplier(u, s, 1.0);
}

double norm_hs(const ScalarField& u, double s, const SupportPolicy& policy) {
  if (s < 0.0) throw PreconditionError("norm_hs: s must be nonnegative");
  require_support_margin(u, policy, "norm_hs");
  return std::sqrt(bessel_energy(u, s, 1.0));
}

double bessel_energy(const ScalarField& f, const ScalarField& g, double s, double lambda) {
  require_same_grid(f.grid(), g.grid(), "bessel_energy");
  const Grid3& grid = f.grid();
  const int n = grid.n;
  const int nh = n / 2 + 1;
  const std::size_t nc = std::size_t(n) * n * nh;
  ComplexBuffer a(nc);
  forward(f, a.p);
  const bool same = &f == &g;
  std::unique_ptr<ComplexBuffer> b;
  if (!same) {
    b = std::make_unique<ComplexBuffer>(nc);
    forward(g, b->p);
  }
  const fftw_complex* bp = same ? a.p : b->p;
  const Table t = symbol_table(grid, s, lambda);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double row = 0.0;
      for (int k = 0; k < nh; ++k) {
        // Interior half-spectrum entries stand for a conjugate pair.
        const double mult = (k == 0 || k == n / 2) ? 1.0 : 2.0;
        const std::size_t q = (std::size_t(i) * n + j) * nh + k;
        const double re = a.p[q][0] * bp[q][0] + a.p[q][1] * bp[q][1];
        row += mult * (*t)[q] * re;
      }
      sum += row;
    }
  }
  // Parseval: sum_x |f|^2 dV = (dV / n^3) sum_xi |f^|^2.
  return sum * grid.cell_volume() / double(grid.size());
}

double bessel_energy(const ScalarField& f, double s, double lambda) {
  return bessel_energy(f, f, s, lambda);
}

}  // namespace hgr
