#include <benchmark/benchmark.h>

#include <cmath>

#include "hgr/evolution.hpp"
#include "hgr/geometry.hpp"
#include "hgr/sobolev.hpp"
#include "hgr/spectral.hpp"

using namespace hgr;

namespace {

ScalarField bump(const Grid3& g) {
  return ScalarField::from_function(g, [](double x, double y, double z) {
    const double r2 = (x * x + y * y + z * z) / 2.25;
    return r2 < 1.0 ? std::pow(1.0 - r2, 6) : 0.0;
  });
}

StateField slice(const Grid3& g) {
  SliceSpec spec;
  spec.radius = 1.0;
  return initial_state(minkowski_slice(g, spec));
}

}  // namespace

static void BM_lambda_s(benchmark::State& st) {
  const Grid3 g(int(st.range(0)), 6.0);
  const ScalarField u = bump(g);
  for (auto _ : st) benchmark::DoNotOptimize(lambda_s(u, 1.6));
  st.SetItemsProcessed(st.iterations() * g.size());
}
BENCHMARK(BM_lambda_s)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_norm_hsd(benchmark::State& st) {
  const Grid3 g(int(st.range(0)), 6.0);
  const DyadicPartition p = build_partition(g, default_j_max(g));
  const ScalarField u = bump(g);
  const NormParams np{1.6, -1.0, 2.0, 0, 0.0};
  for (auto _ : st) benchmark::DoNotOptimize(norm_hsd(u, p, np));
}
BENCHMARK(BM_norm_hsd)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_rhs(benchmark::State& st) {
  const Grid3 g(int(st.range(0)), 6.0);
  const StateField U = slice(g);
  for (auto _ : st) benchmark::DoNotOptimize(rhs(U, U));
  st.SetItemsProcessed(st.iterations() * g.size());
}
BENCHMARK(BM_rhs)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_reduced_Q_point(benchmark::State& st) {
  Mat4 g = minkowski4();
  g[0][1] = g[1][0] = 0.01;
  g[2][2] = 1.02;
  const Mat4 gi = invert4(g);
  Deriv1 dg{};
  for (int c = 0; c < 4; ++c)
    for (int a = 0; a < 4; ++a)
      for (int b = a; b < 4; ++b) dg[c][a][b] = dg[c][b][a] = 0.01 * (1 + c + 2 * a - b);
  for (auto _ : st) benchmark::DoNotOptimize(reduced_Q_point(gi, dg));
}
BENCHMARK(BM_reduced_Q_point);
BENCHMARK_MAIN();
