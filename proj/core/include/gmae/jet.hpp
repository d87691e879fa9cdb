#ifndef GMAE_JET_HPP
#define GMAE_JET_HPP

#include <array>
#include <utility>

#include "gmae/expr.hpp"

namespace gmae {

/// A point of the five-dimensional 1-jet chart (x,y,z,p,q).
struct JetPoint {
  double x = 0, y = 0, z = 0, p = 0, q = 0;

  EvalPoint eval_point() const { return EvalPoint::jet(x, y, z, p, q); }
  std::array<double, 5> coords() const { return {x, y, z, p, q}; }
};

/// 1-form with symbolic coefficients on the basis (dx, dy, dz, dp, dq).
struct OneForm {
  Expr c_dx, c_dy, c_dz, c_dp, c_dq;

  std::array<double, 5> coeffs_at(const JetPoint& pt) const;
  /// Pairing with a tangent 5-vector at pt.
  double apply(const JetPoint& pt, const std::array<double, 5>& v) const;
};

/// The pair of quasilinear second-order equations with coefficient
/// functions A,B,C,D of (x,y,z,p,q); its differential system is
/// generated by the contact form and A dp + B dq + C dx + D dy.
struct GeneralGmas {
  Expr a, b, c, d;
};

/// Which coefficient is assumed nonzero when factoring or reducing.
enum class CoeffCase { A, B, C, D };

/// Tag for the reduced total derivatives d/dx, d/dy and the fiber
/// derivatives entering each case's triple.
enum class DerivTag { X, Y, P, Q };

/// The single-function system z_xx = alpha z_xy, z_xy = alpha z_yy
/// with every scalar field the analysis needs cached symbolically.
class AlphaSystem {
 public:
  explicit AlphaSystem(Expr alpha);

  const Expr& alpha() const { return alpha_; }
  /// First partial of alpha; `v` must be one of the five chart variables.
  const Expr& d(Var v) const;
  /// Second partial; symmetric by construction (shared subtree).
  const Expr& d2(Var a, Var b) const;

  /// alpha_x + p alpha_z - alpha (alpha_y + q alpha_z); vanishing
  /// identically is the involutivity condition (characteristic line field).
  const Expr& involutivity_defect() const { return involutivity_defect_; }
  /// 1 + x (alpha_y + q alpha_z); nonvanishing selects the generic chart.
  const Expr& genericity_factor() const { return genericity_factor_; }
  const Expr& genericity_factor_inv() const { return genericity_factor_inv_; }
  /// y + alpha x, the first leaf coordinate of the generic chart and the
  /// ODE right-hand side of the non-generic one.
  const Expr& base_shift() const { return base_shift_; }
  /// x (alpha_q + alpha alpha_p); drift term of the singularity
  /// identifier in generic mode.
  const Expr& lambda_drift_generic() const { return lambda_drift_generic_; }
  /// alpha_q + alpha alpha_p; non-generic counterpart.
  const Expr& lambda_drift_nongeneric() const {
    return lambda_drift_nongeneric_;
  }

 private:
  Expr alpha_;
  std::array<Expr, 5> d1_;
  std::array<std::array<Expr, 5>, 5> d2_;
  Expr involutivity_defect_;
  Expr genericity_factor_;
  Expr genericity_factor_inv_;
  Expr base_shift_;
  Expr lambda_drift_generic_;
  Expr lambda_drift_nongeneric_;
};

/// The generating forms of the alpha-system: the contact form
/// dz - p dx - q dy and dp - alpha dq.
std::pair<OneForm, OneForm> canonical_forms(const AlphaSystem& sys);

/// Embeds the alpha-system as the four-coefficient system
/// (A,B,C,D) = (1, -alpha, 0, 0).
GeneralGmas as_general(const AlphaSystem& sys);

/// Factors d(omega0) as eta1 ^ eta2 modulo the two generators, using the
/// case whose coefficient is nonzero at pt. The returned pair is checked
/// numerically at pt on a basis of the annihilated 3-plane. Throws
/// NumericError if the selected coefficient vanishes at pt or the
/// congruence check fails.
std::pair<OneForm, OneForm> eta_factorization(const GeneralGmas& g,
                                              CoeffCase kase,
                                              const JetPoint& pt);

/// The reduced derivative of f for the given case and tag, built from
/// d/dx = @x + p @z and d/dy = @y + q @z. Valid tags: case A {x,y,q},
/// case B {x,y,p}, case C {y,p,q}, case D {x,p,q}; anything else throws
/// std::invalid_argument.
Expr reduced_derivative(const Expr& f, const GeneralGmas& g, CoeffCase kase,
                        DerivTag tag);

/// Total derivatives along the contact plane.
Expr d_dx(const Expr& f);  // @f/@x + p @f/@z
Expr d_dy(const Expr& f);  // @f/@y + q @f/@z

}  // namespace gmae

#endif
