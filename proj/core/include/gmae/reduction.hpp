#ifndef GMAE_REDUCTION_HPP
#define GMAE_REDUCTION_HPP

#include <array>
#include <optional>
#include <string>

#include "gmae/jet.hpp"

namespace gmae {

/// Which first-integral chart applies: Generic uses x1 = y + alpha x,
/// NonGeneric uses x1 = alpha. The remaining leaf coordinates are
/// x2 = z - p x - q y, x3 = p, x4 = q in both modes; x0 = x is the
/// fiber coordinate.
enum class Mode { Generic, NonGeneric };

const char* to_string(Mode m);

struct ReducedPoint {
  double x1 = 0, x2 = 0, x3 = 0, x4 = 0;
  std::optional<double> x0;  // fiber coordinate, required for inversion

  std::array<double, 4> leaf() const { return {x1, x2, x3, x4}; }
};

struct NewtonOptions {
  int max_iter = 50;
  double tol = 1e-13;       // max-norm residual target
  double min_det = 1e-14;   // Jacobian determinant guard
};

/// Warm-start state for chart inversion along continuation paths.
struct YzGuess {
  double y = 0, z = 0;
};

ReducedPoint phi_forward(const AlphaSystem& sys, Mode mode, const JetPoint& pt);

/// Analytic 5x5 Jacobian of the forward chart map at pt, rows ordered
/// (x0, x1, x2, x3, x4), columns (x, y, z, p, q).
std::array<std::array<double, 5>, 5> phi_jacobian(const AlphaSystem& sys,
                                                  Mode mode,
                                                  const JetPoint& pt);

/// Local inverse of the chart map by damped Newton on the two unknowns
/// (y, z); x, p, q are first integrals and are copied verbatim from
/// (x0, x3, x4). Throws NumericError on divergence or a singular
/// Jacobian, both of which signal leaving the chart. The default guess
/// is (y, z) = (x1, x2) in generic mode and (0, x2) in non-generic mode;
/// continuation callers should pass the neighboring solution.
JetPoint phi_inverse(const AlphaSystem& sys, Mode mode,
                     const ReducedPoint& target,
                     std::optional<YzGuess> guess = std::nullopt,
                     const NewtonOptions& opt = {});

/// f composed with the inverse chart map: evaluates f at
/// phi_inverse(target).
double bar_eval(const AlphaSystem& sys, Mode mode, const Expr& f,
                const ReducedPoint& target,
                std::optional<YzGuess> guess = std::nullopt,
                const NewtonOptions& opt = {});

struct BaseFunctionCheckOptions {
  int samples = 40;
  double fd_step = 1e-5;
  double tol = 1e-6;
  std::uint64_t seed = 0x7d2c1b3a94e05f68ull;
};

/// True iff the central difference of bar_eval in the fiber coordinate
/// stays below tol at every sample drawn from the box, i.e. f descends
/// to the leaf space. The box is read on the reduced coordinates
/// (x0 -> Var::X slot, x1..x4 -> Var::Y,Z,P,Q slots).
bool base_function_check(const AlphaSystem& sys, Mode mode, const Expr& f,
                         const Box& box,
                         const BaseFunctionCheckOptions& opt = {},
                         const NewtonOptions& newton = {});

/// Generators of the reduced differential system on the leaf space.
/// Generic mode:     xi1 = dx2 + x1 dx4,        xi2 = dx3 - abar dx4;
/// non-generic mode: xi1 = dx2 + betabar dx4,   xi2 = dx3 - x1 dx4,
/// where the barred coefficients are chart compositions evaluated
/// through the Newton inverse (x0 taken from the query point).
class ReducedGenerators {
 public:
  ReducedGenerators(const AlphaSystem& sys, Mode mode, NewtonOptions opt = {});

  Mode mode() const { return mode_; }
  /// Coefficient vectors on (dx1, dx2, dx3, dx4) at a reduced point.
  std::array<double, 4> xi1_at(const ReducedPoint& pt) const;
  std::array<double, 4> xi2_at(const ReducedPoint& pt) const;
  std::string xi1_text() const;
  std::string xi2_text() const;

 private:
  const AlphaSystem* sys_;
  Mode mode_;
  NewtonOptions newton_;
};

ReducedGenerators reduced_generators(const AlphaSystem& sys, Mode mode,
                                     const NewtonOptions& opt = {});

}  // namespace gmae

#endif
