#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gmae/verify.hpp"

using namespace gmae;

namespace {

struct Run {
  AlphaSystem sys;
  SeedCurve seed;
  MuSolution mu;
  Mode mode;

  Run(const char* alpha, const char* xi, Mode m, double mu0, double t_lo,
      double t_hi)
      : sys(parse(alpha)),
        seed(parse(xi), t_lo, t_hi),
        mu(integrate_mu(sys, m, seed, 0.0, mu0, opts())),
        mode(m) {}

  static IntegrateOptions opts() {
    IntegrateOptions o;
    o.step = 1e-3;
    return o;
  }

  SurfaceChart chart() const { return SurfaceChart(sys, mode, seed, mu); }
};

}  // namespace

TEST_CASE("pullback residuals vanish on a constructed surface") {
  Run run("q", "t^4", Mode::Generic, 0.0, -0.8, 0.8);
  const IntegralSurface surf = build_surface(
      run.chart(), linspace(-0.5, 0.5, 101), linspace(-0.5, 0.5, 101));
  const ResidualSummary r = pullback_residuals(run.sys, surf);
  CHECK(r.max_contact_residual < 1e-8);
  CHECK(r.max_psi_residual < 1e-8);
}

TEST_CASE("pullback residuals detect and scale with corruption") {
  Run run("q", "t^4", Mode::Generic, 0.0, -0.8, 0.8);
  const IntegralSurface clean = build_surface(
      run.chart(), linspace(-0.5, 0.5, 101), linspace(-0.5, 0.5, 101));
  const double baseline =
      pullback_residuals(run.sys, clean).max_contact_residual;

  auto corrupted_residual = [&](double amplitude) {
    IntegralSurface surf = clean;
    surf.jets[surf.idx(50, 50)].z += amplitude;
    return pullback_residuals(run.sys, surf).max_contact_residual;
  };

  const double r3 = corrupted_residual(1e-3);
  CHECK(r3 > 50.0 * baseline);
  CHECK(r3 > 1e-4);
  CHECK(r3 < 1.0);

  // linear scaling across four decades of injected amplitude
  double prev = corrupted_residual(1e-6);
  for (double amp : {1e-5, 1e-4, 1e-3, 1e-2}) {
    const double cur = corrupted_residual(amp);
    CHECK(cur / prev == doctest::Approx(10.0).epsilon(0.2));
    prev = cur;
  }
}

TEST_CASE("pullback residuals require a 2x2 surface") {
  Run run("q", "t^3", Mode::Generic, 0.0, -0.8, 0.8);
  const IntegralSurface tiny =
      build_surface(run.chart(), linspace(0.1, 0.1, 1), linspace(0.1, 0.1, 1));
  CHECK_THROWS_AS(pullback_residuals(run.sys, tiny), std::invalid_argument);
}

TEST_CASE("classical residual on a smooth graph patch") {
  Run run("q", "t^4", Mode::Generic, 0.0, -0.8, 0.8);
  const IntegralSurface surf = build_surface(
      run.chart(), linspace(-0.5, 0.5, 101), linspace(-0.5, 0.5, 101));
  const PdePatch patch{60, 95, 65, 95};  // s in [0.1, 0.45], t in [0.15, 0.45]

  PdeOptions coarse;
  coarse.nx = coarse.ny = 129;
  coarse.stride = 2;
  const auto [r1, r2] =
      pde_residual_on_graph(run.chart(), surf, patch, coarse);
  CHECK(r1 < 1e-3);
  CHECK(r2 < 1e-3);

  PdeOptions fine;  // same resample grid, half the stencil spacing
  fine.nx = fine.ny = 129;
  const auto [f1, f2] = pde_residual_on_graph(run.chart(), surf, patch, fine);
  CHECK(f1 < 1e-3);
  CHECK(f2 < 1e-3);
  CHECK(r1 / f1 >= 3.5);
  CHECK(r2 / f2 >= 3.5);
}

TEST_CASE("patches across the singular curve are rejected") {
  Run run("q", "t^4", Mode::Generic, 0.0, -0.8, 0.8);
  const IntegralSurface surf = build_surface(
      run.chart(), linspace(-0.5, 0.5, 41), linspace(-0.5, 0.5, 41));
  // the identifier 12 t^2 + s changes sign inside this rectangle
  const PdePatch patch{4, 12, 12, 28};
  CHECK_THROWS_AS(pde_residual_on_graph(run.chart(), surf, patch),
                  NumericError);
}

TEST_CASE("flat coefficient yields residuals at rounding level") {
  // with alpha = 0 and this seed the front is the graph z = y^2/2 + x
  Run run("0", "-t^2/2", Mode::Generic, 1.0, -0.8, 0.8);
  const IntegralSurface surf = build_surface(
      run.chart(), linspace(0.2, 1.0, 41), linspace(-0.5, 0.5, 41));
  const PdePatch patch{5, 35, 5, 35};
  const auto [r1, r2] = pde_residual_on_graph(run.chart(), surf, patch);
  CHECK(r1 < 1e-9);
  CHECK(r2 < 1e-9);
}

TEST_CASE("finite-difference crosscheck of the cached partials") {
  const AlphaSystem simple(parse("q"));
  CHECK(fd_crosscheck_suite(simple, Box::cube(1.0, 2.0)) < 1e-9);

  const AlphaSystem rational(parse("-z/(q*x) + 1/x + p/q"));
  CHECK(fd_crosscheck_suite(rational, Box::cube(1.0, 2.0)) < 1e-6);

  const SeedCurve seed(parse("(t - log(2))^4"), 0.5, 2.5);
  const AlphaSystem apq(parse("p + q^2"));
  CHECK(fd_crosscheck_suite(apq, Box::cube(1.0, 2.0), &seed) < 1e-6);
}
