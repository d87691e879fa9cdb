#ifndef GMAE_CHARACTERISTICS_HPP
#define GMAE_CHARACTERISTICS_HPP

#include <cstdint>
#include <vector>

#include "gmae/reduction.hpp"

namespace gmae {

/// A curve t -> xi(t) seeding the characteristic construction, with its
/// first five derivatives cached symbolically. In generic mode xi plays
/// the x2 coordinate of the integral curve, in non-generic mode the x3
/// coordinate; the classification criteria consume derivatives up to
/// order five.
class SeedCurve {
 public:
  /// `xi` is an expression in Var::T. The derivative cache is
  /// spot-checked against central finite differences on construction.
  SeedCurve(Expr xi, double t_min, double t_max);

  double t_min() const { return t_min_; }
  double t_max() const { return t_max_; }
  double value(double t) const { return derivative(0, t); }
  /// k-th derivative, 0 <= k <= 5.
  double derivative(int k, double t) const;
  const Expr& expr(int k = 0) const;

 private:
  std::array<Expr, 6> d_;
  double t_min_, t_max_;
};

/// Dense output of the characteristic ODE: nodes on a uniform step with
/// stored right-hand-side slopes, evaluated in between by cubic Hermite
/// interpolation.
class MuSolution {
 public:
  MuSolution(std::vector<double> t, std::vector<double> mu,
             std::vector<double> slope, double step);

  double t_min() const { return t_.front(); }
  double t_max() const { return t_.back(); }
  double step() const { return step_; }
  std::size_t size() const { return t_.size(); }
  double node_t(std::size_t i) const { return t_[i]; }
  double node_mu(std::size_t i) const { return mu_[i]; }
  double node_slope(std::size_t i) const { return slope_[i]; }

  double eval(double t) const;
  double eval_derivative(double t) const;

 private:
  std::vector<double> t_, mu_, slope_;
  double step_;
};

struct IntegrateOptions {
  double step = 1e-3;
  double x0_ref = 1.0;  // fiber value used for bar-function evaluation
  NewtonOptions newton{};
};

/// Integrates the scalar characteristic ODE with the classical
/// fixed-step fourth-order scheme from (t0, mu0), covering
/// [seed.t_min(), seed.t_max()]. Generic mode solves for the x3
/// coordinate with right-hand side bar(alpha)(-xi'(t), xi(t), mu, t);
/// non-generic mode solves for x2 with right-hand side
/// -bar(y + alpha x)(xi'(t), mu, xi(t), t). Bar functions are evaluated
/// on the reference fiber x0_ref, which the descent lemma licenses; run
/// base_function_check once per configuration to confirm.
MuSolution integrate_mu(const AlphaSystem& sys, Mode mode,
                        const SeedCurve& seed, double t0, double mu0,
                        const IntegrateOptions& opt = {});

/// The reduced-coordinate target lifting (s,t) onto the integral
/// surface: generic (s, -xi'(t), xi(t), mu(t), t), non-generic
/// (s, xi'(t), mu(t), xi(t), t).
ReducedPoint surface_target(Mode mode, const SeedCurve& seed,
                            const MuSolution& mu, double s, double t);

/// Discretized geometric solution: lifted jet points over a uniform
/// (s,t) grid, the front (x,y,z) values, the two closed-form tangent
/// 3-vectors per node, and a validity mask (false marks chart-inversion
/// failures; such holes are never interpolated).
struct IntegralSurface {
  Mode mode = Mode::Generic;
  std::vector<double> s, t;
  std::vector<JetPoint> jets;                    // s-major: index i*nt+j
  std::vector<std::uint8_t> valid;
  std::vector<std::array<double, 3>> tangent_s;  // d(front)/ds
  std::vector<std::array<double, 3>> tangent_t;  // d(front)/dt
  int holes = 0;

  int ns() const { return static_cast<int>(s.size()); }
  int nt() const { return static_cast<int>(t.size()); }
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i) * t.size() + static_cast<std::size_t>(j);
  }
  const JetPoint& at(int i, int j) const { return jets[idx(i, j)]; }
  bool ok(int i, int j) const { return valid[idx(i, j)] != 0; }
  std::array<double, 3> front(int i, int j) const {
    const JetPoint& pt = at(i, j);
    return {pt.x, pt.y, pt.z};
  }
};

/// Evaluation context tying a chart to a seed curve and an integrated
/// mu, so surface data and the singularity identifier can be computed
/// at arbitrary (s,t).
class SurfaceChart {
 public:
  SurfaceChart(const AlphaSystem& sys, Mode mode, const SeedCurve& seed,
               const MuSolution& mu, NewtonOptions newton = {});

  const AlphaSystem& sys() const { return *sys_; }
  Mode mode() const { return mode_; }
  const SeedCurve& seed() const { return *seed_; }
  const MuSolution& mu() const { return *mu_; }
  const NewtonOptions& newton() const { return newton_; }

  JetPoint jet_at(double s, double t,
                  std::optional<YzGuess> guess = std::nullopt) const;

 private:
  const AlphaSystem* sys_;
  Mode mode_;
  const SeedCurve* seed_;
  const MuSolution* mu_;
  NewtonOptions newton_;
};

/// Lifts the grid through the inverse chart map with row-wise
/// continuation warm starts. Inversion failures are masked, not filled.
IntegralSurface build_surface(const SurfaceChart& chart,
                              const std::vector<double>& s_grid,
                              const std::vector<double>& t_grid);

/// Closed-form tangents of the front map at a lifted jet point.
/// Generic: d/ds = (1, -a, p - a q), d/dt = -rho (xi'' + K) (0, 1, q)
/// with a = alpha, K = x (alpha_q + alpha alpha_p) at the point.
/// Non-generic: d/ds = (1, m, p + q m) with m = x (alpha_x + p alpha_z),
/// d/dt = x (L - xi'') (0, 1, q) with L = alpha_q + alpha alpha_p.
std::pair<std::array<double, 3>, std::array<double, 3>> closed_form_tangents(
    const AlphaSystem& sys, Mode mode, const SeedCurve& seed,
    const JetPoint& pt, double t);

/// 5-vector tangents of the jet-space surface itself (same formulas
/// extended with the p,q components), used by the residual oracles.
std::pair<std::array<double, 5>, std::array<double, 5>> closed_form_jet_tangents(
    const AlphaSystem& sys, Mode mode, const SeedCurve& seed,
    const MuSolution& mu, const JetPoint& pt, double t);

}  // namespace gmae

#endif
