#include <benchmark/benchmark.h>

#include "gmae/characteristics.hpp"
#include "gmae/singularity.hpp"

namespace {

void BM_ParseDiff(benchmark::State& state) {
  for (auto _ : state) {
    const gmae::Expr alpha = gmae::parse("-z/(q*x) + 1/x + p/q");
    benchmark::DoNotOptimize(gmae::diff(alpha, gmae::Var::Q));
  }
}
BENCHMARK(BM_ParseDiff);

void BM_ChartInversion(benchmark::State& state) {
  const gmae::AlphaSystem sys(gmae::parse("p + q^2"));
  gmae::ReducedPoint target;
  target.x0 = 1.0;
  target.x1 = 0.3;
  target.x2 = -0.2;
  target.x3 = 0.7;
  target.x4 = 0.4;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        gmae::phi_inverse(sys, gmae::Mode::Generic, target));
  }
}
BENCHMARK(BM_ChartInversion);

void BM_MuIntegration(benchmark::State& state) {
  const gmae::AlphaSystem sys(gmae::parse("p + q^2"));
  const gmae::SeedCurve seed(gmae::parse("(t - log(2))^4"), -0.2, 1.2);
  gmae::IntegrateOptions opt;
  opt.step = 1e-3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        gmae::integrate_mu(sys, gmae::Mode::Generic, seed, 0.0, -1.0, opt));
  }
}
BENCHMARK(BM_MuIntegration);

void BM_LambdaScan(benchmark::State& state) {
  const gmae::AlphaSystem sys(gmae::parse("q"));
  const gmae::SeedCurve seed(gmae::parse("t^4"), -0.8, 0.8);
  gmae::IntegrateOptions opt;
  opt.step = 1e-3;
  const gmae::MuSolution mu =
      gmae::integrate_mu(sys, gmae::Mode::Generic, seed, 0.0, 0.0, opt);
  const gmae::SurfaceChart chart(sys, gmae::Mode::Generic, seed, mu);
  const auto s_grid = gmae::linspace(-0.5, 0.5, 31);
  const auto t_grid = gmae::linspace(-0.5, 0.5, 31);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gmae::singular_set(chart, s_grid, t_grid));
  }
}
BENCHMARK(BM_LambdaScan);

}  // namespace

BENCHMARK_MAIN();
