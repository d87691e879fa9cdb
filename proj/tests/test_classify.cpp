#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gmae/classify.hpp"

using namespace gmae;

namespace {

JetPoint random_jet(std::mt19937_64& rng, double lo = 1.0, double hi = 2.0) {
  std::uniform_real_distribution<double> unit(lo, hi);
  return JetPoint{unit(rng), unit(rng), unit(rng), unit(rng), unit(rng)};
}

}  // namespace

TEST_CASE("characteristic dimension, case A closed forms") {
  std::mt19937_64 rng(101);

  const AlphaSystem involutive(parse("q"));
  const GeneralGmas g1 = as_general(involutive);
  for (int k = 0; k < 100; ++k) {
    CHECK(cauchy_dim_general(g1, CoeffCase::A, random_jet(rng)) == 1);
  }

  const AlphaSystem not_involutive(parse("x"));
  const GeneralGmas g2 = as_general(not_involutive);
  for (int k = 0; k < 20; ++k) {
    CHECK(cauchy_dim_general(g2, CoeffCase::A, random_jet(rng)) == 0);
  }

  // trivial system dp = 0
  const GeneralGmas g3{Expr::constant(1.0), Expr::constant(0.0),
                       Expr::constant(0.0), Expr::constant(0.0)};
  for (int k = 0; k < 20; ++k) {
    CHECK(cauchy_dim_general(g3, CoeffCase::A, random_jet(rng)) == 1);
  }
}

TEST_CASE("characteristic dimension through case B") {
  std::mt19937_64 rng(111);
  // -q dp + dq spans the same line as dp - (1/q) dq, which is involutive
  const GeneralGmas inv{parse("-q"), Expr::constant(1.0), Expr::constant(0.0),
                        Expr::constant(0.0)};
  const GeneralGmas noninv{parse("-x"), Expr::constant(1.0),
                           Expr::constant(0.0), Expr::constant(0.0)};
  for (int k = 0; k < 50; ++k) {
    const JetPoint pt = random_jet(rng);
    CHECK(cauchy_dim_general(inv, CoeffCase::B, pt) == 1);
    CHECK(cauchy_dim_general(noninv, CoeffCase::B, pt) == 0);
  }
}

TEST_CASE("characteristic dimension rejects a vanishing coefficient") {
  const GeneralGmas g{Expr::constant(0.0), Expr::constant(1.0),
                      Expr::constant(0.0), Expr::constant(0.0)};
  CHECK_THROWS_AS(cauchy_dim_general(g, CoeffCase::A, JetPoint{1, 1, 1, 1, 1}),
                  NumericError);
}

TEST_CASE("equivalence of the two characteristic-dimension routes") {
  // the case-A condition for (1, -alpha, 0, 0) must agree with the sign
  // test on the involutivity defect
  const char* alphas[5] = {"q", "p + q^2", "(p*q - y)/x", "x", "y"};
  std::mt19937_64 rng(121);
  const double eps = 1e-9;
  for (const char* text : alphas) {
    const AlphaSystem sys(parse(text));
    const GeneralGmas g = as_general(sys);
    int disagreements = 0;
    for (int k = 0; k < 1000; ++k) {
      const JetPoint pt = random_jet(rng);
      const int via_general = cauchy_dim_general(g, CoeffCase::A, pt, eps);
      const auto r = eval_with_scale(sys.involutivity_defect(), pt.eval_point());
      const int via_defect = std::abs(r.value) <= eps * (1.0 + r.scale) ? 1 : 0;
      if (via_general != via_defect) ++disagreements;
    }
    CHECK(disagreements == 0);
  }
}

TEST_CASE("involutive families are recognized") {
  const Box box = Box::cube(1.0, 2.0);
  // f(z - p x - q y, p, q) with f = u v
  const Expr u = parse("z - p*x - q*y");
  const AlphaSystem a1(u * Expr::variable(Var::P));
  CHECK(involutive_test(a1, box) == TriState::Yes);

  const AlphaSystem a2(parse("(p*q - y)/x"));
  CHECK(involutive_test(a2, box) == TriState::Yes);

  const AlphaSystem a3(parse("x"));
  CHECK(involutive_test(a3, box) == TriState::No);
}

TEST_CASE("pointwise-only involutivity is reported, not promoted") {
  // defect equals x: vanishes on the hyperplane x = 0 only
  const AlphaSystem sys(parse("x^2/2"));
  const Box box = Box::cube(-1.0, 1.0);
  CHECK(involutive_test(sys, box) == TriState::No);
  const JetPoint pinned{0.0, 0.5, 0.5, 0.5, 0.5};
  std::vector<JetPoint> pins{pinned};
  CHECK(involutive_test(sys, box, pins) == TriState::PointwiseOnly);
}

TEST_CASE("genericity of the worked coefficient functions") {
  const Box box = Box::cube(1.0, 2.0);
  CHECK(genericity_test(AlphaSystem(parse("q")), box).verdict ==
        Genericity::Generic);
  CHECK(genericity_test(AlphaSystem(parse("(q - y)/x")), box).verdict ==
        Genericity::NonGeneric);

  // factor 1 + x vanishes inside a box straddling x = -1
  Box wide = Box::cube(1.0, 2.0);
  wide.set(Var::X, -2.0, 0.0);
  const auto mixed = genericity_test(AlphaSystem(parse("y")), wide);
  CHECK(mixed.verdict == Genericity::Mixed);
  CHECK(mixed.zero_witness.has_value());
  CHECK(mixed.nonzero_witness.has_value());
}

TEST_CASE("derived type in generic mode") {
  const Box box = Box::cube(1.0, 2.0);

  const auto r1 = derived_type_generic(AlphaSystem(parse("p + q^2")), box);
  CHECK(r1.type == DerivedType::T23);
  CHECK(r1.max_d1 < 1e-10);
  CHECK(r1.max_d2 < 1e-10);

  const auto r2 = derived_type_generic(AlphaSystem(parse("q")), box);
  CHECK(r2.type == DerivedType::T23);
  CHECK(r2.max_d1 < 1e-10);
  CHECK(r2.max_d2 < 1e-10);

  const auto r3 =
      derived_type_generic(AlphaSystem(parse("z - p*x - q*y")), box);
  CHECK(r3.type == DerivedType::T234);
  CHECK(r3.max_d1 >= 0.9);
}

TEST_CASE("derived type preconditions are enforced") {
  const Box box = Box::cube(1.0, 2.0);
  CHECK_THROWS_AS(derived_type_generic(AlphaSystem(parse("x")), box),
                  std::invalid_argument);
  CHECK_THROWS_AS(derived_type_generic(AlphaSystem(parse("(q - y)/x")), box),
                  std::invalid_argument);
  CHECK_THROWS_AS(derived_type_nongeneric(AlphaSystem(parse("q")), box),
                  std::invalid_argument);
}

TEST_CASE("derived type in non-generic mode") {
  const Box box = Box::cube(1.0, 2.0);
  CHECK(derived_type_nongeneric(AlphaSystem(parse("(q^2 - y)/x")), box).type ==
        DerivedType::T23);
  CHECK(derived_type_nongeneric(AlphaSystem(parse("(p - y)/x")), box).type ==
        DerivedType::T234);
  CHECK(derived_type_nongeneric(AlphaSystem(parse("-z/(q*x) + 1/x + p/q")),
                                box)
            .type == DerivedType::T23);
}

TEST_CASE("derived type is stable under box shrinking") {
  for (const char* text : {"p + q^2", "q", "z - p*x - q*y"}) {
    const auto full =
        derived_type_generic(AlphaSystem(parse(text)), Box::cube(1.0, 2.0));
    const auto half =
        derived_type_generic(AlphaSystem(parse(text)), Box::cube(1.25, 1.75));
    CHECK(full.type == half.type);
  }
}

TEST_CASE("classification report wiring") {
  const Box box = Box::cube(1.0, 2.0);

  const auto rep = classify_alpha(AlphaSystem(parse("p + q^2")), box);
  CHECK(rep.involutive == TriState::Yes);
  CHECK(rep.genericity.verdict == Genericity::Generic);
  CHECK(rep.derived.type == DerivedType::T23);
  CHECK(rep.cauchy_dim_at.size() == 5);
  for (const auto& [pt, dim] : rep.cauchy_dim_at) CHECK(dim == 1);

  // derived type must stay undetermined when not involutive
  const auto rep2 = classify_alpha(AlphaSystem(parse("x")), box);
  CHECK(rep2.involutive == TriState::No);
  CHECK(rep2.derived.type == DerivedType::Undetermined);
}
