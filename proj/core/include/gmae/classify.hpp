#ifndef GMAE_CLASSIFY_HPP
#define GMAE_CLASSIFY_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gmae/jet.hpp"

namespace gmae {

enum class TriState { Yes, No, PointwiseOnly };
enum class Genericity { Generic, NonGeneric, Mixed };
enum class DerivedType { T23, T234, Undetermined };

const char* to_string(TriState s);
const char* to_string(Genericity g);
const char* to_string(DerivedType t);

struct ClassifyOptions {
  int samples = 200;
  double eps_zero = 1e-9;  // relative, scale-aware
  std::uint64_t seed = 0x51a0b53c6f1e2d4bull;
};

/// Characteristic dimension of the four-coefficient system at a point,
/// decided by the printed two-equation condition of the selected case.
/// Returns 1 when both condition lines vanish at pt (relative to the
/// local term scale), 0 otherwise. Throws NumericError when the case
/// coefficient vanishes at pt.
int cauchy_dim_general(const GeneralGmas& g, CoeffCase kase, const JetPoint& pt,
                       double eps_zero = 1e-9);

/// Yes iff the involutivity defect vanishes identically on the box;
/// No iff it is decisively nonzero at some sample; PointwiseOnly when it
/// vanishes at every pinned point but not across the box.
TriState involutive_test(const AlphaSystem& sys, const Box& box,
                         std::span<const JetPoint> pinned = {},
                         const ClassifyOptions& opt = {});

struct GenericityResult {
  Genericity verdict;
  std::optional<JetPoint> zero_witness;     // for Mixed
  std::optional<JetPoint> nonzero_witness;  // for Mixed
  double min_abs = 0.0;                     // min |factor| over samples
};

GenericityResult genericity_test(const AlphaSystem& sys, const Box& box,
                                 const ClassifyOptions& opt = {});

struct DerivedTypeResult {
  DerivedType type = DerivedType::Undetermined;
  double max_d1 = 0.0;  // generic-mode discriminants over samples
  double max_d2 = 0.0;
  double max_nongeneric = 0.0;  // |alpha_p + x alpha_z| over samples
};

/// Both discriminant expressions used by the generic-mode criterion.
std::pair<Expr, Expr> generic_discriminants(const AlphaSystem& sys);
/// alpha_p + x alpha_z, the non-generic-mode discriminant.
Expr nongeneric_discriminant(const AlphaSystem& sys);

/// Derived type of the reduced system in generic mode: (2,3) iff both
/// discriminants vanish identically on the box. Preconditions
/// (involutive, generic) are re-checked; violation throws
/// std::invalid_argument.
DerivedTypeResult derived_type_generic(const AlphaSystem& sys, const Box& box,
                                       const ClassifyOptions& opt = {});

/// Non-generic counterpart: (2,3) iff alpha_p + x alpha_z vanishes
/// identically on the box.
DerivedTypeResult derived_type_nongeneric(const AlphaSystem& sys,
                                          const Box& box,
                                          const ClassifyOptions& opt = {});

struct ClassificationReport {
  TriState involutive = TriState::No;
  double max_involutivity_defect = 0.0;
  GenericityResult genericity;
  DerivedTypeResult derived;
  std::vector<std::pair<JetPoint, int>> cauchy_dim_at;  // case-A probes
};

/// Full report for an alpha-system over a probe box. The derived type is
/// only computed when the system is involutive over the box and the
/// genericity verdict is not mixed.
ClassificationReport classify_alpha(const AlphaSystem& sys, const Box& box,
                                    std::span<const JetPoint> pinned = {},
                                    const ClassifyOptions& opt = {});

}  // namespace gmae

#endif
