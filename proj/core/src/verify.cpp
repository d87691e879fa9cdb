#include "gmae/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace gmae {

namespace {

std::array<double, 5> jet_coords(const JetPoint& pt) { return pt.coords(); }

// discrete tangent along one grid direction. Grids with at least five
// nodes use the fourth-order stencil exclusively, so the boundary ring
// without full support is skipped rather than polluting the maxima with
// low-order truncation; smaller grids degrade to what fits.
bool discrete_tangent(const IntegralSurface& surf, int i, int j, bool along_s,
                      std::array<double, 5>& out) {
  const int n = along_s ? surf.ns() : surf.nt();
  const int c = along_s ? i : j;
  auto node = [&](int k) -> const JetPoint& {
    return along_s ? surf.at(k, j) : surf.at(i, k);
  };
  auto ok = [&](int k) { return along_s ? surf.ok(k, j) : surf.ok(i, k); };
  const auto& axis = along_s ? surf.s : surf.t;
  auto spacing = [&](int k) {
    return axis[static_cast<std::size_t>(k + 1)] -
           axis[static_cast<std::size_t>(k)];
  };
  if (n >= 5) {
    if (c - 2 < 0 || c + 2 >= n || !ok(c - 2) || !ok(c - 1) || !ok(c + 1) ||
        !ok(c + 2)) {
      return false;
    }
    const double h = spacing(c);
    const auto a = jet_coords(node(c - 2));
    const auto b = jet_coords(node(c - 1));
    const auto d = jet_coords(node(c + 1));
    const auto e = jet_coords(node(c + 2));
    for (int k = 0; k < 5; ++k) {
      out[k] = (a[k] - 8.0 * b[k] + 8.0 * d[k] - e[k]) / (12.0 * h);
    }
    return true;
  }
  if (n >= 3) {
    if (c - 1 < 0 || c + 1 >= n || !ok(c - 1) || !ok(c + 1)) return false;
    const double h = spacing(c);
    const auto b = jet_coords(node(c - 1));
    const auto d = jet_coords(node(c + 1));
    for (int k = 0; k < 5; ++k) out[k] = (d[k] - b[k]) / (2.0 * h);
    return true;
  }
  // two nodes: the plain chord
  const int lo = c > 0 ? c - 1 : c;
  if (!ok(lo) || !ok(lo + 1)) return false;
  const double h = spacing(lo);
  const auto b = jet_coords(node(lo));
  const auto d = jet_coords(node(lo + 1));
  for (int k = 0; k < 5; ++k) out[k] = (d[k] - b[k]) / h;
  return true;
}

}  // namespace

ResidualSummary pullback_residuals(const AlphaSystem& sys,
                                   const IntegralSurface& surf) {
  int valid_count = 0;
  for (auto v : surf.valid) valid_count += v;
  if (surf.ns() < 2 || surf.nt() < 2 || valid_count < 4) {
    throw std::invalid_argument("pullback_residuals needs >= 2x2 valid nodes");
  }
  ResidualSummary out;
  for (int i = 0; i < surf.ns(); ++i) {
    for (int j = 0; j < surf.nt(); ++j) {
      if (!surf.ok(i, j)) continue;
      std::array<double, 5> ts{}, tt{};
      if (!discrete_tangent(surf, i, j, true, ts) ||
          !discrete_tangent(surf, i, j, false, tt)) {
        continue;
      }
      const JetPoint& pt = surf.at(i, j);
      const double a = eval(sys.alpha(), pt.eval_point());
      for (const auto& tan : {ts, tt}) {
        const double contact = tan[2] - pt.p * tan[0] - pt.q * tan[1];
        const double psi = tan[3] - a * tan[4];
        out.max_contact_residual =
            std::max(out.max_contact_residual, std::abs(contact));
        out.max_psi_residual = std::max(out.max_psi_residual, std::abs(psi));
      }
    }
  }
  return out;
}

std::pair<double, double> pde_residual_on_graph(const SurfaceChart& chart,
                                                const IntegralSurface& surf,
                                                const PdePatch& patch,
                                                const PdeOptions& opt) {
  if (patch.i0 < 0 || patch.j0 < 0 || patch.i1 >= surf.ns() ||
      patch.j1 >= surf.nt() || patch.i1 - patch.i0 < 1 ||
      patch.j1 - patch.j0 < 1) {
    throw std::invalid_argument("bad patch rectangle");
  }

  // injectivity of (s,t) -> (X,Y) over the patch; X == s so the
  // discrete Jacobian determinant reduces to dY/dt per cell
  double sign = 0.0;
  for (int i = patch.i0; i <= patch.i1; ++i) {
    for (int j = patch.j0; j < patch.j1; ++j) {
      if (!surf.ok(i, j) || !surf.ok(i, j + 1)) {
        throw NumericError("patch contains masked nodes");
      }
      const double dy = (surf.at(i, j + 1).y - surf.at(i, j).y) /
                        (surf.t[static_cast<std::size_t>(j + 1)] -
                         surf.t[static_cast<std::size_t>(j)]);
      if (std::abs(dy) < opt.min_jacobian) {
        throw NumericError("patch is not injective over (x,y)");
      }
      if (sign == 0.0) {
        sign = dy > 0 ? 1.0 : -1.0;
      } else if (dy * sign < 0) {
        throw NumericError("patch folds over (x,y)");
      }
    }
  }

  // resample rectangle in (x,y): x spans the patch s-range, y the
  // intersection of the per-column Y-ranges, both shaved by the margin
  const double x_lo_full = surf.s[static_cast<std::size_t>(patch.i0)];
  const double x_hi_full = surf.s[static_cast<std::size_t>(patch.i1)];
  double y_lo = -std::numeric_limits<double>::infinity();
  double y_hi = std::numeric_limits<double>::infinity();
  for (int i = patch.i0; i <= patch.i1; ++i) {
    double col_lo = std::numeric_limits<double>::infinity();
    double col_hi = -std::numeric_limits<double>::infinity();
    for (int j = patch.j0; j <= patch.j1; ++j) {
      col_lo = std::min(col_lo, surf.at(i, j).y);
      col_hi = std::max(col_hi, surf.at(i, j).y);
    }
    y_lo = std::max(y_lo, col_lo);
    y_hi = std::min(y_hi, col_hi);
  }
  const double x_pad = opt.margin * (x_hi_full - x_lo_full);
  const double y_pad = opt.margin * (y_hi - y_lo);
  const double x_lo = x_lo_full + x_pad, x_hi = x_hi_full - x_pad;
  if (!(y_hi - 2 * y_pad > y_lo) || !(x_hi > x_lo)) {
    throw NumericError("patch too skewed for a common (x,y) rectangle");
  }
  const auto xs = linspace(x_lo, x_hi, opt.nx);
  const auto ys = linspace(y_lo + y_pad, y_hi - y_pad, opt.ny);

  const double t_lo = surf.t[static_cast<std::size_t>(patch.j0)];
  const double t_hi = surf.t[static_cast<std::size_t>(patch.j1)];

  // z on the regular grid by solving Y(x, t) = y for t column-wise
  std::vector<double> zgrid(static_cast<std::size_t>(opt.nx) * opt.ny);
  for (int a = 0; a < opt.nx; ++a) {
    double t = 0.5 * (t_lo + t_hi);
    for (int b = 0; b < opt.ny; ++b) {
      const double x = xs[static_cast<std::size_t>(a)];
      const double y = ys[static_cast<std::size_t>(b)];
      bool converged = false;
      for (int it = 0; it < 60; ++it) {
        const JetPoint pt = chart.jet_at(x, t);
        const double r = pt.y - y;
        if (std::abs(r) < 1e-12 * (1.0 + std::abs(y))) {
          zgrid[static_cast<std::size_t>(a) * opt.ny + b] = pt.z;
          converged = true;
          break;
        }
        auto [ts_, tt_] = closed_form_tangents(chart.sys(), chart.mode(),
                                               chart.seed(), pt, t);
        (void)ts_;
        if (std::abs(tt_[1]) < 1e-12) {
          throw NumericError("resample hit the singular curve");
        }
        double step = r / tt_[1];
        const double limit = 0.5 * (t_hi - t_lo);
        step = std::clamp(step, -limit, limit);
        t -= step;
        t = std::clamp(t, t_lo - 0.1 * (t_hi - t_lo), t_hi + 0.1 * (t_hi - t_lo));
      }
      if (!converged) {
        throw NumericError("resample Newton failed inside the patch");
      }
    }
  }

  const int st = opt.stride;
  const double hx = st * (xs[1] - xs[0]);
  const double hy = st * (ys[1] - ys[0]);
  auto zat = [&](int a, int b) {
    return zgrid[static_cast<std::size_t>(a) * opt.ny + b];
  };
  double r1 = 0.0, r2 = 0.0;
  for (int a = st; a + st < opt.nx; ++a) {
    for (int b = st; b + st < opt.ny; ++b) {
      const double zx = (zat(a + st, b) - zat(a - st, b)) / (2 * hx);
      const double zy = (zat(a, b + st) - zat(a, b - st)) / (2 * hy);
      const double zxx =
          (zat(a + st, b) - 2 * zat(a, b) + zat(a - st, b)) / (hx * hx);
      const double zyy =
          (zat(a, b + st) - 2 * zat(a, b) + zat(a, b - st)) / (hy * hy);
      const double zxy = (zat(a + st, b + st) - zat(a + st, b - st) -
                          zat(a - st, b + st) + zat(a - st, b - st)) /
                         (4 * hx * hy);
      const double alpha = eval(
          chart.sys().alpha(),
          EvalPoint::jet(xs[static_cast<std::size_t>(a)],
                         ys[static_cast<std::size_t>(b)], zat(a, b), zx, zy));
      r1 = std::max(r1, std::abs(zxx - alpha * zxy));
      r2 = std::max(r2, std::abs(zxy - alpha * zyy));
    }
  }
  return {r1, r2};
}

double fd_crosscheck_suite(const AlphaSystem& sys, const Box& box,
                           const SeedCurve* seed,
                           const FdCrosscheckOptions& opt) {
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Var chart_vars[5] = {Var::X, Var::Y, Var::Z, Var::P, Var::Q};
  double worst = 0.0;
  const double h = opt.step;

  auto central = [&](const Expr& f, EvalPoint at, Var v, double center) {
    EvalPoint lo = at, hi = at;
    lo.set(v, center - h);
    hi.set(v, center + h);
    return (eval(f, hi) - eval(f, lo)) / (2.0 * h);
  };

  int redraws = 0;
  for (int i = 0; i < opt.samples; ++i) {
    for (;;) {
      JetPoint pt;
      auto draw = [&](Var v) {
        const auto [lo, hi] = box.range[static_cast<int>(v)];
        return lo + (hi - lo) * unit(rng);
      };
      pt = JetPoint{draw(Var::X), draw(Var::Y), draw(Var::Z), draw(Var::P),
                    draw(Var::Q)};
      const EvalPoint at = pt.eval_point();
      const double coords[5] = {pt.x, pt.y, pt.z, pt.p, pt.q};
      try {
        for (int a = 0; a < 5; ++a) {
          const double sym = eval(sys.d(chart_vars[a]), at);
          const double fd = central(sys.alpha(), at, chart_vars[a], coords[a]);
          worst = std::max(worst, std::abs(sym - fd) / (1.0 + std::abs(sym)));
          for (int b = a; b < 5; ++b) {
            const double sym2 = eval(sys.d2(chart_vars[a], chart_vars[b]), at);
            const double fd2 =
                central(sys.d(chart_vars[a]), at, chart_vars[b], coords[b]);
            worst =
                std::max(worst, std::abs(sym2 - fd2) / (1.0 + std::abs(sym2)));
          }
        }
        break;
      } catch (const EvalError&) {
        if (++redraws > 10 * opt.samples) {
          throw NumericError("fd_crosscheck_suite: box too singular");
        }
      }
    }
  }

  if (seed != nullptr) {
    const auto [t_lo, t_hi] = box.range[static_cast<int>(Var::T)];
    for (int i = 0; i < opt.samples; ++i) {
      const double t = t_lo + (t_hi - t_lo) * unit(rng);
      for (int k = 0; k < 5; ++k) {
        const double fd = (seed->derivative(k, t + h) - seed->derivative(k, t - h)) /
                          (2.0 * h);
        const double sym = seed->derivative(k + 1, t);
        worst = std::max(worst, std::abs(sym - fd) / (1.0 + std::abs(sym)));
      }
    }
  }
  return worst;
}

}  // namespace gmae
