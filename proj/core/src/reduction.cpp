#include "gmae/reduction.hpp"

#include <cmath>
#include <random>

namespace gmae {

const char* to_string(Mode m) {
  return m == Mode::Generic ? "generic" : "nongeneric";
}

ReducedPoint phi_forward(const AlphaSystem& sys, Mode mode, const JetPoint& pt) {
  const double a = eval(sys.alpha(), pt.eval_point());
  ReducedPoint out;
  out.x0 = pt.x;
  out.x1 = mode == Mode::Generic ? pt.y + a * pt.x : a;
  out.x2 = pt.z - pt.p * pt.x - pt.q * pt.y;
  out.x3 = pt.p;
  out.x4 = pt.q;
  return out;
}

std::array<std::array<double, 5>, 5> phi_jacobian(const AlphaSystem& sys,
                                                  Mode mode,
                                                  const JetPoint& pt) {
  const EvalPoint at = pt.eval_point();
  const double a = eval(sys.alpha(), at);
  const double ax = eval(sys.d(Var::X), at);
  const double ay = eval(sys.d(Var::Y), at);
  const double az = eval(sys.d(Var::Z), at);
  const double ap = eval(sys.d(Var::P), at);
  const double aq = eval(sys.d(Var::Q), at);

  std::array<std::array<double, 5>, 5> j{};
  j[0] = {1, 0, 0, 0, 0};
  if (mode == Mode::Generic) {
    j[1] = {ax * pt.x + a, 1 + ay * pt.x, az * pt.x, ap * pt.x, aq * pt.x};
  } else {
    j[1] = {ax, ay, az, ap, aq};
  }
  j[2] = {-pt.p, -pt.q, 1, -pt.x, -pt.y};
  j[3] = {0, 0, 0, 1, 0};
  j[4] = {0, 0, 0, 0, 1};
  return j;
}

namespace {

struct Residual {
  double r1, r2;
  double max_norm() const { return std::max(std::abs(r1), std::abs(r2)); }
};

Residual chart_residual(const AlphaSystem& sys, Mode mode,
                        const ReducedPoint& target, const JetPoint& pt) {
  const double a = eval(sys.alpha(), pt.eval_point());
  Residual r;
  r.r1 = (mode == Mode::Generic ? pt.y + a * pt.x : a) - target.x1;
  r.r2 = pt.z - pt.p * pt.x - pt.q * pt.y - target.x2;
  return r;
}

}  // namespace

JetPoint phi_inverse(const AlphaSystem& sys, Mode mode,
                     const ReducedPoint& target, std::optional<YzGuess> guess,
                     const NewtonOptions& opt) {
  if (!target.x0) {
    throw std::invalid_argument("phi_inverse needs the fiber coordinate x0");
  }
  JetPoint pt;
  pt.x = *target.x0;
  pt.p = target.x3;
  pt.q = target.x4;
  if (guess) {
    pt.y = guess->y;
    pt.z = guess->z;
  } else if (mode == Mode::Generic) {
    pt.y = target.x1;
    pt.z = target.x2;
  } else {
    pt.y = 0.0;
    pt.z = target.x2;
  }

  Residual res;
  try {
    res = chart_residual(sys, mode, target, pt);
  } catch (const EvalError& err) {
    throw NumericError(std::string("chart inversion: coefficient undefined "
                                   "at the start point: ") +
                       err.what());
  }
  for (int iter = 0; iter < opt.max_iter; ++iter) {
    if (res.max_norm() <= opt.tol) return pt;
    const EvalPoint at = pt.eval_point();
    double ay, az;
    try {
      ay = eval(sys.d(Var::Y), at);
      az = eval(sys.d(Var::Z), at);
    } catch (const EvalError& err) {
      throw NumericError(
          std::string("chart inversion: Jacobian undefined: ") + err.what());
    }
    // rows: d(r1)/d(y,z), d(r2)/d(y,z)
    double j11, j12;
    if (mode == Mode::Generic) {
      j11 = 1.0 + pt.x * ay;
      j12 = pt.x * az;
    } else {
      j11 = ay;
      j12 = az;
    }
    const double j21 = -pt.q;
    const double j22 = 1.0;
    const double det = j11 * j22 - j12 * j21;
    if (std::abs(det) < opt.min_det) {
      throw NumericError("chart inversion: singular Jacobian (chart boundary)");
    }
    const double dy = (res.r1 * j22 - res.r2 * j12) / det;
    const double dz = (j11 * res.r2 - j21 * res.r1) / det;

    // damped step: halve until the residual shrinks
    double lambda = 1.0;
    for (int halvings = 0; halvings < 12; ++halvings) {
      JetPoint trial = pt;
      trial.y = pt.y - lambda * dy;
      trial.z = pt.z - lambda * dz;
      try {
        const Residual tr = chart_residual(sys, mode, target, trial);
        if (tr.max_norm() < res.max_norm() || tr.max_norm() <= opt.tol) {
          pt = trial;
          res = tr;
          lambda = -1.0;
          break;
        }
      } catch (const EvalError&) {
        // trial left the domain of alpha, shorten the step
      }
      lambda *= 0.5;
    }
    if (lambda > 0.0) {
      throw NumericError("chart inversion: damped Newton stalled");
    }
  }
  if (res.max_norm() <= opt.tol) return pt;
  throw NumericError("chart inversion: Newton did not converge");
}

double bar_eval(const AlphaSystem& sys, Mode mode, const Expr& f,
                const ReducedPoint& target, std::optional<YzGuess> guess,
                const NewtonOptions& opt) {
  const JetPoint pt = phi_inverse(sys, mode, target, guess, opt);
  return eval(f, pt.eval_point());
}

bool base_function_check(const AlphaSystem& sys, Mode mode, const Expr& f,
                         const Box& box, const BaseFunctionCheckOptions& opt,
                         const NewtonOptions& newton) {
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&](Var slot) {
    const auto [lo, hi] = box.range[static_cast<int>(slot)];
    return lo + (hi - lo) * unit(rng);
  };
  int tried = 0;
  int accepted = 0;
  while (accepted < opt.samples) {
    if (++tried > 20 * opt.samples) {
      throw NumericError("base_function_check: sampling budget exhausted");
    }
    ReducedPoint target;
    target.x0 = draw(Var::X);
    target.x1 = draw(Var::Y);
    target.x2 = draw(Var::Z);
    target.x3 = draw(Var::P);
    target.x4 = draw(Var::Q);
    try {
      const JetPoint center = phi_inverse(sys, mode, target, std::nullopt, newton);
      const YzGuess warm{center.y, center.z};
      ReducedPoint lo = target;
      ReducedPoint hi = target;
      *lo.x0 -= opt.fd_step;
      *hi.x0 += opt.fd_step;
      const double f_lo = bar_eval(sys, mode, f, lo, warm, newton);
      const double f_hi = bar_eval(sys, mode, f, hi, warm, newton);
      const double deriv = (f_hi - f_lo) / (2.0 * opt.fd_step);
      if (std::abs(deriv) >= opt.tol) return false;
      ++accepted;
    } catch (const NumericError&) {
      // target outside the chart, redraw
    } catch (const EvalError&) {
      // f undefined there, redraw
    }
  }
  return true;
}

ReducedGenerators::ReducedGenerators(const AlphaSystem& sys, Mode mode,
                                     NewtonOptions opt)
    : sys_(&sys), mode_(mode), newton_(opt) {}

std::array<double, 4> ReducedGenerators::xi1_at(const ReducedPoint& pt) const {
  if (mode_ == Mode::Generic) {
    return {0.0, 1.0, 0.0, pt.x1};
  }
  const double betabar =
      bar_eval(*sys_, mode_, sys_->base_shift(), pt, std::nullopt, newton_);
  return {0.0, 1.0, 0.0, betabar};
}

std::array<double, 4> ReducedGenerators::xi2_at(const ReducedPoint& pt) const {
  if (mode_ == Mode::Generic) {
    const double abar =
        bar_eval(*sys_, mode_, sys_->alpha(), pt, std::nullopt, newton_);
    return {0.0, 0.0, 1.0, -abar};
  }
  return {0.0, 0.0, 1.0, -pt.x1};
}

std::string ReducedGenerators::xi1_text() const {
  return mode_ == Mode::Generic ? "dx2 + x1 dx4" : "dx2 + bar(y + alpha x) dx4";
}

std::string ReducedGenerators::xi2_text() const {
  return mode_ == Mode::Generic ? "dx3 - bar(alpha) dx4" : "dx3 - x1 dx4";
}

ReducedGenerators reduced_generators(const AlphaSystem& sys, Mode mode,
                                     const NewtonOptions& opt) {
  return ReducedGenerators(sys, mode, opt);
}

}  // namespace gmae
