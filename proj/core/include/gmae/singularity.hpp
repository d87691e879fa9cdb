#ifndef GMAE_SINGULARITY_HPP
#define GMAE_SINGULARITY_HPP

#include <string>
#include <vector>

#include "gmae/characteristics.hpp"

namespace gmae {

enum class SingClass { CuspidalEdge, Swallowtail, Butterfly, Beaks, Unclassified };

const char* to_string(SingClass c);

struct SingularityOptions {
  double locate_tol = 1e-10;  // |lambda_hat| target when refining
  double eps_deriv = 1e-6;    // threshold for "derivative vanishes"
  double h1 = 1e-4;           // first-derivative step (fourth-order stencil)
  double h2 = 1e-3;           // second-derivative step
  double h3 = 1e-2;           // third-derivative step
  int max_bisect = 200;
  int max_polish = 30;
};

struct SingularPoint {
  double s = 0, t = 0;
  double lambda = 0;            // identifier value at the point
  double lambda_s = 0, lambda_t = 0;
  bool degenerate = false;
  SingClass cls = SingClass::Unclassified;
  double lambda_tt = 0, lambda_ttt = 0;  // eta-direction derivatives
  double det_hessian = 0;                // filled on the degenerate path
  std::string note;
};

struct SingularityReport {
  std::vector<SingularPoint> points;  // sorted by (t, s)
};

/// The singularity identifier of the front map. Generic mode:
/// xi''(t) + K at the lifted point with K = x (alpha_q + alpha alpha_p);
/// non-generic mode: L - xi''(t) with L = alpha_q + alpha alpha_p.
/// Vanishes exactly on the singular set of the front.
double lambda_hat(const SurfaceChart& chart, double s, double t);

/// Scans the grid for zeros of the identifier: nodes already below the
/// locate tolerance, sign changes along grid edges refined by bisection,
/// and critical points recovered by Newton iteration on the gradient
/// (candidate degenerate points, confirmed by |lambda_hat| at the
/// solution). Returns bare locations sorted by (t, s).
std::vector<std::pair<double, double>> singular_set(
    const SurfaceChart& chart, const std::vector<double>& s_grid,
    const std::vector<double>& t_grid, const SingularityOptions& opt = {});

/// Non-degenerate iff the identifier has a nonzero gradient at the
/// point (fourth-order central differences).
bool degeneracy_test(const SurfaceChart& chart, double s, double t,
                     const SingularityOptions& opt = {});

/// Applies the front-singularity criteria along the null direction
/// d/dt. Cascade: non-degenerate with lambda_t != 0 is a cuspidal edge;
/// with lambda_s != 0, lambda_t = 0 and lambda_tt != 0 a swallowtail;
/// with lambda_s != 0, lambda_t = lambda_tt = 0 and lambda_ttt != 0 a
/// butterfly; degenerate with negative Hessian determinant,
/// lambda_tt != 0 and a rank-1 front differential is a beaks. Anything
/// else is reported Unclassified with diagnostics attached.
SingularPoint classify_singularity(const SurfaceChart& chart, double s,
                                   double t,
                                   const SingularityOptions& opt = {});

/// Full scan: locate, then classify every point.
SingularityReport singularity_scan(const SurfaceChart& chart,
                                   const std::vector<double>& s_grid,
                                   const std::vector<double>& t_grid,
                                   const SingularityOptions& opt = {});

/// Unit normal of the front at (s,t): (-p, -q, 1) normalized, evaluated
/// at the lifted jet point. Well-defined on the singular set as well.
std::array<double, 3> unit_normal(const SurfaceChart& chart, double s,
                                  double t);

}  // namespace gmae

#endif
