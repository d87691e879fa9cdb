#include "gmae/classify.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace gmae {

const char* to_string(TriState s) {
  switch (s) {
    case TriState::Yes: return "yes";
    case TriState::No: return "no";
    case TriState::PointwiseOnly: return "pointwise-only";
  }
  return "?";
}

const char* to_string(Genericity g) {
  switch (g) {
    case Genericity::Generic: return "generic";
    case Genericity::NonGeneric: return "non-generic";
    case Genericity::Mixed: return "mixed";
  }
  return "?";
}

const char* to_string(DerivedType t) {
  switch (t) {
    case DerivedType::T23: return "(2,3)";
    case DerivedType::T234: return "(2,3,4)";
    case DerivedType::Undetermined: return "undetermined";
  }
  return "?";
}

namespace {

// The two condition lines of the characteristic-dimension criterion,
// assembled exactly as printed for each case.
std::pair<Expr, Expr> cauchy_condition(const GeneralGmas& g, CoeffCase kase) {
  auto rd = [&g, kase](const Expr& f, DerivTag tag) {
    return reduced_derivative(f, g, kase, tag);
  };
  switch (kase) {
    case CoeffCase::A: {
      const Expr inner = rd(g.b, DerivTag::Y) - rd(g.d, DerivTag::Q) -
                         (rd(g.a, DerivTag::Y) * g.b - g.d * rd(g.a, DerivTag::Q)) / g.a;
      const Expr l1 = rd(g.b, DerivTag::X) - rd(g.c, DerivTag::Q) -
                      (rd(g.a, DerivTag::X) * g.b - g.c * rd(g.a, DerivTag::Q)) / g.a +
                      (g.b / g.a) * inner;
      const Expr l2 = rd(g.d, DerivTag::X) - rd(g.c, DerivTag::Y) -
                      (rd(g.a, DerivTag::X) * g.d - rd(g.a, DerivTag::Y) * g.c) / g.a +
                      (g.d / g.a) * inner;
      return {l1, l2};
    }
    case CoeffCase::B: {
      const Expr inner = rd(g.a, DerivTag::X) - rd(g.c, DerivTag::P) -
                         (rd(g.b, DerivTag::X) * g.a - g.c * rd(g.b, DerivTag::P)) / g.b;
      const Expr l1 = rd(g.d, DerivTag::X) - rd(g.c, DerivTag::Y) -
                      (rd(g.b, DerivTag::X) * g.d - rd(g.b, DerivTag::Y) * g.c) / g.b -
                      (g.c / g.b) * inner;
      const Expr l2 = rd(g.a, DerivTag::Y) - rd(g.d, DerivTag::P) -
                      (rd(g.b, DerivTag::Y) * g.a - g.d * rd(g.b, DerivTag::P)) / g.b +
                      (g.a / g.b) * inner;
      return {l1, l2};
    }
    case CoeffCase::C: {
      const Expr inner = rd(g.b, DerivTag::Y) - rd(g.c, DerivTag::Q) -
                         (rd(g.c, DerivTag::Y) * g.b - rd(g.c, DerivTag::Q) * g.d) / g.c;
      const Expr l1 = rd(g.a, DerivTag::Y) - rd(g.d, DerivTag::P) -
                      (rd(g.c, DerivTag::Y) * g.a - rd(g.c, DerivTag::P) * g.d) / g.c +
                      (g.d / g.c) * inner;
      const Expr l2 = rd(g.b, DerivTag::P) - rd(g.a, DerivTag::Q) -
                      (rd(g.c, DerivTag::P) * g.b - rd(g.c, DerivTag::Q) * g.a) / g.c -
                      (g.b / g.c) * inner;
      return {l1, l2};
    }
    case CoeffCase::D: {
      const Expr inner = rd(g.a, DerivTag::X) - rd(g.c, DerivTag::P) -
                         (rd(g.d, DerivTag::X) * g.a - rd(g.d, DerivTag::P) * g.c) / g.d;
      const Expr l1 = rd(g.b, DerivTag::X) - rd(g.c, DerivTag::Q) -
                      (rd(g.d, DerivTag::X) * g.b - rd(g.d, DerivTag::Q) * g.c) / g.d +
                      (g.c / g.d) * inner;
      const Expr l2 = rd(g.b, DerivTag::P) - rd(g.a, DerivTag::Q) -
                      (rd(g.d, DerivTag::P) * g.b - rd(g.d, DerivTag::Q) * g.a) / g.d +
                      (g.a / g.d) * inner;
      return {l1, l2};
    }
  }
  throw std::invalid_argument("bad case");
}

const Expr& case_coeff(const GeneralGmas& g, CoeffCase kase) {
  switch (kase) {
    case CoeffCase::A: return g.a;
    case CoeffCase::B: return g.b;
    case CoeffCase::C: return g.c;
    case CoeffCase::D: return g.d;
  }
  throw std::invalid_argument("bad case");
}

JetPoint draw_point(std::mt19937_64& rng, const Box& box) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&](Var v) {
    const auto [lo, hi] = box.range[static_cast<int>(v)];
    return lo + (hi - lo) * unit(rng);
  };
  return JetPoint{draw(Var::X), draw(Var::Y), draw(Var::Z), draw(Var::P),
                  draw(Var::Q)};
}

// Max scale-normalized |e| over samples; domain errors are redrawn.
double max_abs_over_box(const Expr& e, const Box& box,
                        const ClassifyOptions& opt, bool normalized = true) {
  std::mt19937_64 rng(opt.seed);
  double worst = 0.0;
  int redraws = 0;
  for (int i = 0; i < opt.samples; ++i) {
    for (;;) {
      const JetPoint pt = draw_point(rng, box);
      try {
        const auto r = eval_with_scale(e, pt.eval_point());
        const double m =
            normalized ? std::abs(r.value) / (1.0 + r.scale) : std::abs(r.value);
        if (m > worst) worst = m;
        break;
      } catch (const EvalError&) {
        if (++redraws > 10 * opt.samples) {
          throw NumericError("probe box too singular for sampling");
        }
      }
    }
  }
  return worst;
}

ZeroTestOptions zero_opts(const ClassifyOptions& opt) {
  ZeroTestOptions z;
  z.samples = opt.samples;
  z.tol = opt.eps_zero;
  z.seed = opt.seed;
  return z;
}

}  // namespace

int cauchy_dim_general(const GeneralGmas& g, CoeffCase kase, const JetPoint& pt,
                       double eps_zero) {
  const EvalPoint at = pt.eval_point();
  if (std::abs(eval(case_coeff(g, kase), at)) < 1e-12) {
    throw NumericError("case coefficient vanishes at the point");
  }
  const auto [l1, l2] = cauchy_condition(g, kase);
  const auto r1 = eval_with_scale(l1, at);
  const auto r2 = eval_with_scale(l2, at);
  const bool zero1 = std::abs(r1.value) <= eps_zero * (1.0 + r1.scale);
  const bool zero2 = std::abs(r2.value) <= eps_zero * (1.0 + r2.scale);
  return (zero1 && zero2) ? 1 : 0;
}

TriState involutive_test(const AlphaSystem& sys, const Box& box,
                         std::span<const JetPoint> pinned,
                         const ClassifyOptions& opt) {
  if (is_identically_zero(sys.involutivity_defect(), box, zero_opts(opt))) {
    return TriState::Yes;
  }
  if (!pinned.empty()) {
    bool all_zero = true;
    for (const auto& pt : pinned) {
      const auto r = eval_with_scale(sys.involutivity_defect(), pt.eval_point());
      if (std::abs(r.value) > opt.eps_zero * (1.0 + r.scale)) {
        all_zero = false;
        break;
      }
    }
    if (all_zero) return TriState::PointwiseOnly;
  }
  return TriState::No;
}

GenericityResult genericity_test(const AlphaSystem& sys, const Box& box,
                                 const ClassifyOptions& opt) {
  GenericityResult out;
  std::mt19937_64 rng(opt.seed);
  double min_abs = std::numeric_limits<double>::infinity();
  double max_abs = -1.0;
  JetPoint argmin{}, argmax{};
  bool has_pos = false, has_neg = false, has_zero = false;
  int redraws = 0;
  for (int i = 0; i < opt.samples; ++i) {
    for (;;) {
      const JetPoint pt = draw_point(rng, box);
      try {
        const auto r =
            eval_with_scale(sys.genericity_factor(), pt.eval_point());
        const double m = std::abs(r.value) / (1.0 + r.scale);
        if (m <= opt.eps_zero) {
          has_zero = true;
        } else {
          (r.value > 0 ? has_pos : has_neg) = true;
        }
        if (m < min_abs) {
          min_abs = m;
          argmin = pt;
        }
        if (m > max_abs) {
          max_abs = m;
          argmax = pt;
        }
        break;
      } catch (const EvalError&) {
        if (++redraws > 10 * opt.samples) {
          throw NumericError("probe box too singular for sampling");
        }
      }
    }
  }
  out.min_abs = min_abs;
  // a sign change means the factor vanishes somewhere inside the box
  const bool crosses = has_pos && has_neg;
  if (!has_zero && !crosses) {
    out.verdict = Genericity::Generic;
    return out;
  }
  if (!crosses &&
      is_identically_zero(sys.genericity_factor(), box, zero_opts(opt))) {
    out.verdict = Genericity::NonGeneric;
    return out;
  }
  out.verdict = Genericity::Mixed;
  out.zero_witness = argmin;
  out.nonzero_witness = argmax;
  return out;
}

std::pair<Expr, Expr> generic_discriminants(const AlphaSystem& sys) {
  const Expr q = Expr::variable(Var::Q);
  const Expr w = sys.d(Var::Y) + q * sys.d(Var::Z);
  const Expr d1 = sys.d(Var::P) * w - sys.alpha() * diff(w, Var::P) -
                  diff(w, Var::Q) - sys.d(Var::Z);
  const Expr d2 = sys.d2(Var::Y, Var::Y) +
                  Expr::constant(2.0) * q * sys.d2(Var::Y, Var::Z) +
                  q * q * sys.d2(Var::Z, Var::Z);
  return {d1, d2};
}

Expr nongeneric_discriminant(const AlphaSystem& sys) {
  return sys.d(Var::P) + Expr::variable(Var::X) * sys.d(Var::Z);
}

DerivedTypeResult derived_type_generic(const AlphaSystem& sys, const Box& box,
                                       const ClassifyOptions& opt) {
  if (involutive_test(sys, box, {}, opt) != TriState::Yes) {
    throw std::invalid_argument("derived type requires an involutive system");
  }
  if (genericity_test(sys, box, opt).verdict != Genericity::Generic) {
    throw std::invalid_argument("generic-mode criterion on a non-generic box");
  }
  const auto [d1, d2] = generic_discriminants(sys);
  DerivedTypeResult out;
  out.max_d1 = max_abs_over_box(d1, box, opt, /*normalized=*/false);
  out.max_d2 = max_abs_over_box(d2, box, opt, /*normalized=*/false);
  const bool z1 = is_identically_zero(d1, box, zero_opts(opt));
  const bool z2 = is_identically_zero(d2, box, zero_opts(opt));
  out.type = (z1 && z2) ? DerivedType::T23 : DerivedType::T234;
  return out;
}

DerivedTypeResult derived_type_nongeneric(const AlphaSystem& sys,
                                          const Box& box,
                                          const ClassifyOptions& opt) {
  if (involutive_test(sys, box, {}, opt) != TriState::Yes) {
    throw std::invalid_argument("derived type requires an involutive system");
  }
  if (genericity_test(sys, box, opt).verdict != Genericity::NonGeneric) {
    throw std::invalid_argument("non-generic-mode criterion on a generic box");
  }
  const Expr disc = nongeneric_discriminant(sys);
  DerivedTypeResult out;
  out.max_nongeneric = max_abs_over_box(disc, box, opt, /*normalized=*/false);
  out.type = is_identically_zero(disc, box, zero_opts(opt)) ? DerivedType::T23
                                                            : DerivedType::T234;
  return out;
}

ClassificationReport classify_alpha(const AlphaSystem& sys, const Box& box,
                                    std::span<const JetPoint> pinned,
                                    const ClassifyOptions& opt) {
  ClassificationReport rep;
  rep.involutive = involutive_test(sys, box, pinned, opt);
  rep.max_involutivity_defect =
      max_abs_over_box(sys.involutivity_defect(), box, opt, false);
  rep.genericity = genericity_test(sys, box, opt);

  if (rep.involutive == TriState::Yes) {
    if (rep.genericity.verdict == Genericity::Generic) {
      rep.derived = derived_type_generic(sys, box, opt);
    } else if (rep.genericity.verdict == Genericity::NonGeneric) {
      rep.derived = derived_type_nongeneric(sys, box, opt);
    }
  }

  const GeneralGmas g = as_general(sys);
  std::mt19937_64 rng(opt.seed ^ 0xabcdef);
  for (int i = 0; i < 5; ++i) {
    const JetPoint pt = draw_point(rng, box);
    try {
      rep.cauchy_dim_at.emplace_back(pt,
                                     cauchy_dim_general(g, CoeffCase::A, pt,
                                                        opt.eps_zero));
    } catch (const NumericError&) {
      // coefficient degenerate at the probe, skip it
    }
  }
  return rep;
}

}  // namespace gmae
