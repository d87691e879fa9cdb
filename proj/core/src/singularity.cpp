#include "gmae/singularity.hpp"

#include <algorithm>
#include <cmath>

namespace gmae {

const char* to_string(SingClass c) {
  switch (c) {
    case SingClass::CuspidalEdge: return "CuspidalEdge";
    case SingClass::Swallowtail: return "Swallowtail";
    case SingClass::Butterfly: return "Butterfly";
    case SingClass::Beaks: return "Beaks";
    case SingClass::Unclassified: return "Unclassified";
  }
  return "?";
}

namespace {

/// lambda_hat with a warm-started chart inversion; FD stencils around a
/// point reuse the center solution as the Newton guess.
class LambdaEval {
 public:
  explicit LambdaEval(const SurfaceChart& chart) : chart_(chart) {}

  double operator()(double s, double t) {
    const JetPoint pt = chart_.jet_at(s, t, warm_);
    warm_ = YzGuess{pt.y, pt.z};
    const EvalPoint at = pt.eval_point();
    const double xi2 = chart_.seed().derivative(2, t);
    if (chart_.mode() == Mode::Generic) {
      return xi2 + eval(chart_.sys().lambda_drift_generic(), at);
    }
    return eval(chart_.sys().lambda_drift_nongeneric(), at) - xi2;
  }

 private:
  const SurfaceChart& chart_;
  std::optional<YzGuess> warm_;
};

// fourth-order central first derivative
double fd1(LambdaEval& f, double s, double t, bool wrt_s, double h) {
  auto at = [&](double d) {
    return wrt_s ? f(s + d, t) : f(s, t + d);
  };
  return (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
}

// fourth-order central second derivative
double fd2(LambdaEval& f, double s, double t, bool wrt_s, double h) {
  auto at = [&](double d) {
    return wrt_s ? f(s + d, t) : f(s, t + d);
  };
  return (-at(2 * h) + 16 * at(h) - 30 * at(0) + 16 * at(-h) - at(-2 * h)) /
         (12 * h * h);
}

// second-order central third derivative
double fd3(LambdaEval& f, double s, double t, bool wrt_s, double h) {
  auto at = [&](double d) {
    return wrt_s ? f(s + d, t) : f(s, t + d);
  };
  return (at(2 * h) - 2 * at(h) + 2 * at(-h) - at(-2 * h)) / (2 * h * h * h);
}

double fd_mixed(LambdaEval& f, double s, double t, double h) {
  return (f(s + h, t + h) - f(s + h, t - h) - f(s - h, t + h) +
          f(s - h, t - h)) /
         (4 * h * h);
}

struct Grad {
  double ds, dt;
  double norm() const { return std::max(std::abs(ds), std::abs(dt)); }
};

Grad gradient(LambdaEval& f, double s, double t, const SingularityOptions& opt) {
  const double hs = opt.h1 * (1.0 + std::abs(s));
  const double ht = opt.h1 * (1.0 + std::abs(t));
  return {fd1(f, s, t, true, hs), fd1(f, s, t, false, ht)};
}

}  // namespace

double lambda_hat(const SurfaceChart& chart, double s, double t) {
  LambdaEval f(chart);
  return f(s, t);
}

std::vector<std::pair<double, double>> singular_set(
    const SurfaceChart& chart, const std::vector<double>& s_grid,
    const std::vector<double>& t_grid, const SingularityOptions& opt) {
  const int ns = static_cast<int>(s_grid.size());
  const int nt = static_cast<int>(t_grid.size());
  std::vector<double> values(static_cast<std::size_t>(ns) * nt,
                             std::numeric_limits<double>::quiet_NaN());
  LambdaEval f(chart);
  for (int i = 0; i < ns; ++i) {
    for (int j = 0; j < nt; ++j) {
      try {
        values[static_cast<std::size_t>(i) * nt + j] = f(s_grid[i], t_grid[j]);
      } catch (const NumericError&) {
        // node outside the chart, leave NaN
      }
    }
  }
  auto value_at = [&](int i, int j) {
    return values[static_cast<std::size_t>(i) * nt + j];
  };

  std::vector<std::pair<double, double>> found;
  auto push_point = [&found](double s, double t) {
    for (const auto& [ps, pt] : found) {
      if (std::abs(ps - s) < 1e-8 && std::abs(pt - t) < 1e-8) return;
    }
    found.emplace_back(s, t);
  };

  // node zeros
  for (int i = 0; i < ns; ++i) {
    for (int j = 0; j < nt; ++j) {
      const double v = value_at(i, j);
      if (std::isfinite(v) && std::abs(v) <= opt.locate_tol) {
        push_point(s_grid[i], t_grid[j]);
      }
    }
  }

  // sign changes refined by bisection along the edge
  auto bisect = [&](double sa, double ta, double va, double sb, double tb,
                    double vb) {
    for (int it = 0; it < opt.max_bisect; ++it) {
      const double sm = 0.5 * (sa + sb);
      const double tm = 0.5 * (ta + tb);
      double vm;
      try {
        vm = f(sm, tm);
      } catch (const NumericError&) {
        return;
      }
      if (std::abs(vm) <= opt.locate_tol) {
        push_point(sm, tm);
        return;
      }
      if ((va < 0) != (vm < 0)) {
        sb = sm;
        tb = tm;
        vb = vm;
      } else {
        sa = sm;
        ta = tm;
        va = vm;
      }
    }
    (void)vb;
  };
  for (int i = 0; i < ns; ++i) {
    for (int j = 0; j < nt; ++j) {
      const double v = value_at(i, j);
      if (!std::isfinite(v) || std::abs(v) <= opt.locate_tol) continue;
      if (i + 1 < ns) {
        const double w = value_at(i + 1, j);
        if (std::isfinite(w) && std::abs(w) > opt.locate_tol && (v < 0) != (w < 0)) {
          bisect(s_grid[i], t_grid[j], v, s_grid[i + 1], t_grid[j], w);
        }
      }
      if (j + 1 < nt) {
        const double w = value_at(i, j + 1);
        if (std::isfinite(w) && std::abs(w) > opt.locate_tol && (v < 0) != (w < 0)) {
          bisect(s_grid[i], t_grid[j], v, s_grid[i], t_grid[j + 1], w);
        }
      }
    }
  }

  // candidate degenerate points: Newton on the gradient from every
  // located point, accepted when the identifier itself vanishes there
  const double s_lo = s_grid.front(), s_hi = s_grid.back();
  const double t_lo = t_grid.front(), t_hi = t_grid.back();
  const double s_margin = 0.05 * (s_hi - s_lo);
  const double t_margin = 0.05 * (t_hi - t_lo);
  std::vector<std::pair<double, double>> polished;
  for (const auto& [s0, t0] : found) {
    double s = s0, t = t0;
    bool converged = false;
    try {
      for (int it = 0; it < opt.max_polish; ++it) {
        const Grad g = gradient(f, s, t, opt);
        // threshold sits above the stencil noise floor of the inversion
        if (g.norm() <= 1e-8) {
          converged = true;
          break;
        }
        const double hss = fd2(f, s, t, true, opt.h2 * (1.0 + std::abs(s)));
        const double htt = fd2(f, s, t, false, opt.h2 * (1.0 + std::abs(t)));
        const double hst = fd_mixed(f, s, t, opt.h2);
        const double det = hss * htt - hst * hst;
        if (std::abs(det) < 1e-12) break;
        const double step_s = (g.ds * htt - g.dt * hst) / det;
        const double step_t = (hss * g.dt - hst * g.ds) / det;
        s -= step_s;
        t -= step_t;
        if (s < s_lo - s_margin || s > s_hi + s_margin || t < t_lo - t_margin ||
            t > t_hi + t_margin) {
          break;
        }
        if (std::max(std::abs(step_s), std::abs(step_t)) < 1e-14) {
          converged = true;
          break;
        }
      }
      if (converged && std::abs(f(s, t)) <= opt.locate_tol) {
        polished.emplace_back(s, t);
      }
    } catch (const NumericError&) {
      // polish left the chart, drop the candidate
    }
  }
  for (const auto& [s, t] : polished) push_point(s, t);

  std::sort(found.begin(), found.end(),
            [](const auto& a, const auto& b) {
              return a.second != b.second ? a.second < b.second
                                          : a.first < b.first;
            });
  return found;
}

bool degeneracy_test(const SurfaceChart& chart, double s, double t,
                     const SingularityOptions& opt) {
  LambdaEval f(chart);
  const Grad g = gradient(f, s, t, opt);
  return !(g.norm() > opt.eps_deriv);
}

SingularPoint classify_singularity(const SurfaceChart& chart, double s,
                                   double t, const SingularityOptions& opt) {
  SingularPoint out;
  out.s = s;
  out.t = t;
  LambdaEval f(chart);
  try {
    out.lambda = f(s, t);
    const Grad g = gradient(f, s, t, opt);
    out.lambda_s = g.ds;
    out.lambda_t = g.dt;
    out.degenerate = !(g.norm() > opt.eps_deriv);
    out.lambda_tt = fd2(f, s, t, false, opt.h2 * (1.0 + std::abs(t)));
    out.lambda_ttt = fd3(f, s, t, false, opt.h3 * (1.0 + std::abs(t)));

    const double eps = opt.eps_deriv;
    if (!out.degenerate) {
      if (std::abs(out.lambda_t) > eps) {
        out.cls = SingClass::CuspidalEdge;
      } else if (std::abs(out.lambda_s) > eps && std::abs(out.lambda_tt) > eps) {
        out.cls = SingClass::Swallowtail;
      } else if (std::abs(out.lambda_s) > eps &&
                 std::abs(out.lambda_ttt) > eps) {
        out.cls = SingClass::Butterfly;
      } else {
        out.note = "non-degenerate point matches no criterion";
      }
    } else {
      const double hss = fd2(f, s, t, true, opt.h2 * (1.0 + std::abs(s)));
      const double hst = fd_mixed(f, s, t, opt.h2);
      out.det_hessian = hss * out.lambda_tt - hst * hst;

      // rank of the 3x2 front differential must be one
      const JetPoint pt = chart.jet_at(s, t);
      auto [ts, tt] = closed_form_tangents(chart.sys(), chart.mode(),
                                           chart.seed(), pt, t);
      double g11 = 0, g12 = 0, g22 = 0;
      for (int i = 0; i < 3; ++i) {
        g11 += ts[i] * ts[i];
        g12 += ts[i] * tt[i];
        g22 += tt[i] * tt[i];
      }
      const double tr = g11 + g22;
      const double det = g11 * g22 - g12 * g12;
      const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
      const double sv_max = std::sqrt(std::max(0.0, tr / 2.0 + disc));
      const double sv_min = std::sqrt(std::max(0.0, tr / 2.0 - disc));
      const bool rank_one = sv_max > eps && sv_min <= eps * (1.0 + sv_max);

      if (out.det_hessian < -eps && std::abs(out.lambda_tt) > eps && rank_one) {
        out.cls = SingClass::Beaks;
      } else {
        out.note = "degenerate point matches no criterion";
      }
    }
  } catch (const NumericError& err) {
    out.cls = SingClass::Unclassified;
    out.note = err.what();
  }
  return out;
}

SingularityReport singularity_scan(const SurfaceChart& chart,
                                   const std::vector<double>& s_grid,
                                   const std::vector<double>& t_grid,
                                   const SingularityOptions& opt) {
  SingularityReport rep;
  for (const auto& [s, t] : singular_set(chart, s_grid, t_grid, opt)) {
    rep.points.push_back(classify_singularity(chart, s, t, opt));
  }
  return rep;
}

std::array<double, 3> unit_normal(const SurfaceChart& chart, double s,
                                  double t) {
  const JetPoint pt = chart.jet_at(s, t);
  const double n = std::sqrt(pt.p * pt.p + pt.q * pt.q + 1.0);
  return {-pt.p / n, -pt.q / n, 1.0 / n};
}

}  // namespace gmae
