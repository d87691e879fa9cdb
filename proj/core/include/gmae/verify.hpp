#ifndef GMAE_VERIFY_HPP
#define GMAE_VERIFY_HPP

#include <optional>
#include <utility>

#include "gmae/characteristics.hpp"

namespace gmae {

struct ResidualSummary {
  double max_contact_residual = 0.0;  // max |omega0(T)| over discrete tangents
  double max_psi_residual = 0.0;      // max |psi(T)|
  double max_fd_mismatch = 0.0;       // worst relative derivative mismatch
  std::optional<std::pair<double, double>> pde_residuals;
};

/// Evaluates the two generating 1-forms on discrete tangents of the jet
/// grid (fourth-order central differences where five nodes are
/// available, second-order central otherwise) and records the maxima
/// over interior nodes. This gates the surface data itself: corrupting
/// a stored coordinate shows up here scaled by 1/h. Requires at least
/// 2x2 valid nodes.
ResidualSummary pullback_residuals(const AlphaSystem& sys,
                                   const IntegralSurface& surf);

/// Inclusive index rectangle into the surface grids.
struct PdePatch {
  int i0, i1;  // s indices
  int j0, j1;  // t indices
};

struct PdeOptions {
  int nx = 25, ny = 25;        // regular resampling grid
  int stride = 1;              // stencil spacing in grid cells; evaluating
                               // stride 2 against stride 1 on one grid gives
                               // a matched-node refinement comparison
  double min_jacobian = 1e-3;  // injectivity bound on the discrete det
  double margin = 0.05;        // fraction shaved off the resample ranges
  NewtonOptions newton{};
};

/// Classical-equation residual on a graph patch: checks the patch is
/// injective over (x,y) via the discrete Jacobian determinant, resamples
/// z over a regular (x,y) grid by inverting the chart column-wise (the
/// front's first component is s, so only t is solved for), forms second
/// differences and returns (max |z_xx - alpha z_xy|,
/// max |z_xy - alpha z_yy|). Throws NumericError when the patch fails
/// the injectivity bound.
std::pair<double, double> pde_residual_on_graph(const SurfaceChart& chart,
                                                const IntegralSurface& surf,
                                                const PdePatch& patch,
                                                const PdeOptions& opt = {});

struct FdCrosscheckOptions {
  int samples = 100;
  double step = 1e-5;
  std::uint64_t seed = 0x3cf5d2a8be471960ull;
};

/// Compares every cached symbolic partial of the system (and the seed
/// curve's derivative chain, when given) against central finite
/// differences at random valid points; returns the worst relative
/// mismatch.
double fd_crosscheck_suite(const AlphaSystem& sys, const Box& box,
                           const SeedCurve* seed = nullptr,
                           const FdCrosscheckOptions& opt = {});

}  // namespace gmae

#endif
