#include "gmae/characteristics.hpp"

#include <cmath>

namespace gmae {

SeedCurve::SeedCurve(Expr xi, double t_min, double t_max)
    : t_min_(t_min), t_max_(t_max) {
  const auto vars = free_vars(xi);
  for (int v = 0; v < kVarCount; ++v) {
    if (vars.test(v) && static_cast<Var>(v) != Var::T) {
      throw std::invalid_argument("seed curve may only depend on t");
    }
  }
  d_[0] = std::move(xi);
  for (int k = 1; k <= 5; ++k) d_[k] = diff(d_[k - 1], Var::T);

  // spot check the cache against central differences
  const double h = 1e-5;
  for (int k = 0; k < 2; ++k) {
    const double t = t_min + (0.3 + 0.4 * k) * (t_max - t_min);
    EvalPoint lo, mid, hi;
    lo.set(Var::T, t - h);
    mid.set(Var::T, t);
    hi.set(Var::T, t + h);
    const double fd = (eval(d_[k], hi) - eval(d_[k], lo)) / (2.0 * h);
    const double ex = eval(d_[k + 1], mid);
    if (std::abs(fd - ex) > 1e-4 * (1.0 + std::abs(ex))) {
      throw NumericError("seed curve derivative cache is inconsistent");
    }
  }
}

double SeedCurve::derivative(int k, double t) const {
  EvalPoint at;
  at.set(Var::T, t);
  return eval(d_.at(static_cast<std::size_t>(k)), at);
}

const Expr& SeedCurve::expr(int k) const {
  return d_.at(static_cast<std::size_t>(k));
}

MuSolution::MuSolution(std::vector<double> t, std::vector<double> mu,
                       std::vector<double> slope, double step)
    : t_(std::move(t)), mu_(std::move(mu)), slope_(std::move(slope)),
      step_(step) {
  if (t_.size() < 2 || t_.size() != mu_.size() || t_.size() != slope_.size()) {
    throw std::invalid_argument("inconsistent dense-output arrays");
  }
}

double MuSolution::eval(double t) const {
  const double span = 1e-9 * (1.0 + std::abs(t_.front()) + std::abs(t_.back()));
  if (t < t_.front() - span || t > t_.back() + span) {
    throw NumericError("mu evaluated outside the integrated range");
  }
  auto i = static_cast<std::size_t>(
      std::clamp((t - t_.front()) / step_, 0.0, double(t_.size() - 2)));
  const double h = t_[i + 1] - t_[i];
  const double u = (t - t_[i]) / h;
  // cubic Hermite on [t_i, t_{i+1}]
  const double u2 = u * u;
  const double u3 = u2 * u;
  return (2 * u3 - 3 * u2 + 1) * mu_[i] + (u3 - 2 * u2 + u) * h * slope_[i] +
         (-2 * u3 + 3 * u2) * mu_[i + 1] + (u3 - u2) * h * slope_[i + 1];
}

double MuSolution::eval_derivative(double t) const {
  const double span = 1e-9 * (1.0 + std::abs(t_.front()) + std::abs(t_.back()));
  if (t < t_.front() - span || t > t_.back() + span) {
    throw NumericError("mu evaluated outside the integrated range");
  }
  auto i = static_cast<std::size_t>(
      std::clamp((t - t_.front()) / step_, 0.0, double(t_.size() - 2)));
  const double h = t_[i + 1] - t_[i];
  const double u = (t - t_[i]) / h;
  const double u2 = u * u;
  return ((6 * u2 - 6 * u) * mu_[i] + (3 * u2 - 4 * u + 1) * h * slope_[i] +
          (-6 * u2 + 6 * u) * mu_[i + 1] + (3 * u2 - 2 * u) * h * slope_[i + 1]) /
         h;
}

namespace {

class OdeRhs {
 public:
  OdeRhs(const AlphaSystem& sys, Mode mode, const SeedCurve& seed,
         const IntegrateOptions& opt)
      : sys_(sys), mode_(mode), seed_(seed), opt_(opt) {}

  double operator()(double t, double mu) {
    ReducedPoint target;
    target.x0 = opt_.x0_ref;
    if (mode_ == Mode::Generic) {
      target.x1 = -seed_.derivative(1, t);
      target.x2 = seed_.value(t);
      target.x3 = mu;
    } else {
      target.x1 = seed_.derivative(1, t);
      target.x2 = mu;
      target.x3 = seed_.value(t);
    }
    target.x4 = t;
    const JetPoint pt = phi_inverse(sys_, mode_, target, warm_, opt_.newton);
    warm_ = YzGuess{pt.y, pt.z};
    const EvalPoint at = pt.eval_point();
    return mode_ == Mode::Generic ? eval(sys_.alpha(), at)
                                  : -eval(sys_.base_shift(), at);
  }

 private:
  const AlphaSystem& sys_;
  Mode mode_;
  const SeedCurve& seed_;
  const IntegrateOptions& opt_;
  std::optional<YzGuess> warm_;
};

// one classical fourth-order step of size h (h may be negative)
double rk4_step(OdeRhs& rhs, double t, double mu, double h) {
  const double k1 = rhs(t, mu);
  const double k2 = rhs(t + 0.5 * h, mu + 0.5 * h * k1);
  const double k3 = rhs(t + 0.5 * h, mu + 0.5 * h * k2);
  const double k4 = rhs(t + h, mu + h * k3);
  return mu + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

MuSolution integrate_mu(const AlphaSystem& sys, Mode mode,
                        const SeedCurve& seed, double t0, double mu0,
                        const IntegrateOptions& opt) {
  if (!(opt.step > 0.0)) throw std::invalid_argument("step must be positive");
  if (t0 < seed.t_min() || t0 > seed.t_max()) {
    throw std::invalid_argument("t0 outside the seed range");
  }
  const double h = opt.step;
  // uniform nodes t0 + k h covering [t_min, t_max]
  const long k_lo = static_cast<long>(std::floor((seed.t_min() - t0) / h));
  const long k_hi = static_cast<long>(std::ceil((seed.t_max() - t0) / h));
  const std::size_t n = static_cast<std::size_t>(k_hi - k_lo + 1);
  std::vector<double> ts(n), mus(n), slopes(n);
  for (std::size_t i = 0; i < n; ++i) ts[i] = t0 + (k_lo + (long)i) * h;

  const std::size_t i0 = static_cast<std::size_t>(-k_lo);
  mus[i0] = mu0;
  auto run_direction = [&](long dir) {
    OdeRhs rhs(sys, mode, seed, opt);
    double t = t0;
    double mu = mu0;
    std::size_t i = i0;
    try {
      while ((dir > 0 && i + 1 < n) || (dir < 0 && i > 0)) {
        mu = rk4_step(rhs, t, mu, dir * h);
        i = static_cast<std::size_t>(static_cast<long>(i) + dir);
        t = ts[i];
        mus[i] = mu;
      }
    } catch (const NumericError& err) {
      throw NumericError(std::string("ODE right-hand side failed near t = ") +
                         std::to_string(t) + ": " + err.what());
    } catch (const EvalError& err) {
      throw NumericError(std::string("ODE right-hand side failed near t = ") +
                         std::to_string(t) + ": " + err.what());
    }
  };
  run_direction(+1);
  run_direction(-1);

  {
    OdeRhs rhs(sys, mode, seed, opt);
    for (std::size_t i = 0; i < n; ++i) slopes[i] = rhs(ts[i], mus[i]);
  }
  return MuSolution(std::move(ts), std::move(mus), std::move(slopes), h);
}

ReducedPoint surface_target(Mode mode, const SeedCurve& seed,
                            const MuSolution& mu, double s, double t) {
  ReducedPoint target;
  target.x0 = s;
  if (mode == Mode::Generic) {
    target.x1 = -seed.derivative(1, t);
    target.x2 = seed.value(t);
    target.x3 = mu.eval(t);
  } else {
    target.x1 = seed.derivative(1, t);
    target.x2 = mu.eval(t);
    target.x3 = seed.value(t);
  }
  target.x4 = t;
  return target;
}

SurfaceChart::SurfaceChart(const AlphaSystem& sys, Mode mode,
                           const SeedCurve& seed, const MuSolution& mu,
                           NewtonOptions newton)
    : sys_(&sys), mode_(mode), seed_(&seed), mu_(&mu), newton_(newton) {}

JetPoint SurfaceChart::jet_at(double s, double t,
                              std::optional<YzGuess> guess) const {
  return phi_inverse(*sys_, mode_, surface_target(mode_, *seed_, *mu_, s, t),
                     guess, newton_);
}

IntegralSurface build_surface(const SurfaceChart& chart,
                              const std::vector<double>& s_grid,
                              const std::vector<double>& t_grid) {
  IntegralSurface surf;
  surf.mode = chart.mode();
  surf.s = s_grid;
  surf.t = t_grid;
  const std::size_t n = s_grid.size() * t_grid.size();
  surf.jets.resize(n);
  surf.valid.assign(n, 0);
  surf.tangent_s.resize(n);
  surf.tangent_t.resize(n);

  std::optional<YzGuess> row_start;
  for (std::size_t j = 0; j < t_grid.size(); ++j) {
    std::optional<YzGuess> warm = row_start;
    row_start.reset();
    for (std::size_t i = 0; i < s_grid.size(); ++i) {
      const std::size_t k = i * t_grid.size() + j;
      try {
        const JetPoint pt = chart.jet_at(s_grid[i], t_grid[j], warm);
        surf.jets[k] = pt;
        surf.valid[k] = 1;
        warm = YzGuess{pt.y, pt.z};
        if (i == 0) row_start = warm;
        auto [ts, tt] = closed_form_tangents(chart.sys(), chart.mode(),
                                             chart.seed(), pt, t_grid[j]);
        surf.tangent_s[k] = ts;
        surf.tangent_t[k] = tt;
      } catch (const NumericError&) {
        ++surf.holes;
        warm.reset();
      }
    }
  }
  return surf;
}

std::pair<std::array<double, 3>, std::array<double, 3>> closed_form_tangents(
    const AlphaSystem& sys, Mode mode, const SeedCurve& seed,
    const JetPoint& pt, double t) {
  const EvalPoint at = pt.eval_point();
  const double xi2 = seed.derivative(2, t);
  if (mode == Mode::Generic) {
    const double a = eval(sys.alpha(), at);
    const double rho = eval(sys.genericity_factor_inv(), at);
    const double drift = eval(sys.lambda_drift_generic(), at);
    const double speed = -rho * (xi2 + drift);
    return {{1.0, -a, pt.p - a * pt.q}, {0.0, speed, pt.q * speed}};
  }
  const double m =
      pt.x * (eval(sys.d(Var::X), at) + pt.p * eval(sys.d(Var::Z), at));
  const double ell = eval(sys.lambda_drift_nongeneric(), at);
  const double speed = pt.x * (ell - xi2);
  return {{1.0, m, pt.p + pt.q * m}, {0.0, speed, pt.q * speed}};
}

std::pair<std::array<double, 5>, std::array<double, 5>>
closed_form_jet_tangents(const AlphaSystem& sys, Mode mode,
                         const SeedCurve& seed, const MuSolution& mu,
                         const JetPoint& pt, double t) {
  auto [fs, ft] = closed_form_tangents(sys, mode, seed, pt, t);
  std::array<double, 5> js{fs[0], fs[1], fs[2], 0.0, 0.0};
  std::array<double, 5> jt{ft[0], ft[1], ft[2], 0.0, 1.0};
  // p runs along mu(t) in generic mode and along xi(t) otherwise
  jt[3] = mode == Mode::Generic ? mu.eval_derivative(t) : seed.derivative(1, t);
  return {js, jt};
}

}  // namespace gmae
