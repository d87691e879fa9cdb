#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gmae/expr.hpp"

using namespace gmae;

namespace {

// random expression trees for the differentiation property
Expr random_expr(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 6);
  std::uniform_real_distribution<double> coef(0.5, 2.5);
  std::uniform_int_distribution<int> var_pick(0, 4);
  switch (pick(rng)) {
    case 0: return Expr::constant(coef(rng));
    case 1: return Expr::variable(static_cast<Var>(var_pick(rng)));
    case 2: return random_expr(rng, depth - 1) + random_expr(rng, depth - 1);
    case 3: return random_expr(rng, depth - 1) * random_expr(rng, depth - 1);
    case 4:
      // keep denominators away from zero on the sample box
      return random_expr(rng, depth - 1) /
             (Expr::constant(3.0) + Expr::variable(static_cast<Var>(var_pick(rng))));
    case 5: return pow(random_expr(rng, depth - 1), 2);
    default: {
      std::uniform_int_distribution<int> f(0, 5);
      switch (f(rng)) {
        case 0: return sin(random_expr(rng, depth - 1));
        case 1: return cos(random_expr(rng, depth - 1));
        case 2:
          return exp(Expr::constant(0.3) * random_expr(rng, depth - 1));
        case 3:
          // arguments kept safely positive on the sample box
          return log(abs(random_expr(rng, depth - 1)) + Expr::constant(2.0));
        case 4:
          return sqrt(abs(random_expr(rng, depth - 1)) + Expr::constant(1.0));
        default: return abs(random_expr(rng, depth - 1));
      }
    }
  }
}

EvalPoint random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.5, 1.5);
  EvalPoint pt;
  for (int v = 0; v < kVarCount; ++v) {
    pt.set(static_cast<Var>(v), unit(rng));
  }
  return pt;
}

}  // namespace

TEST_CASE("parse evaluates simple arithmetic") {
  const Expr e = parse("p - q*q");
  EvalPoint pt;
  pt.set(Var::P, 1.0).set(Var::Q, 2.0);
  CHECK(eval(e, pt) == doctest::Approx(-3.0));
}

TEST_CASE("parse rejects unknown identifiers with an offset") {
  try {
    parse("(g_is_not_builtin)");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 1);
    CHECK(std::string(e.what()).find("unknown identifier") != std::string::npos);
  }
}

TEST_CASE("parse rejects non-integer exponents") {
  CHECK_THROWS_AS(parse("x^1.5"), ParseError);
  CHECK_THROWS_AS(parse("x^q"), ParseError);
  CHECK_THROWS_AS(parse("x^"), ParseError);
}

TEST_CASE("parse handles the rational coefficient family") {
  const Expr e = parse("-z/(q*x) + 1/x + p/q");
  EvalPoint pt = EvalPoint::jet(2.0, 0.0, 3.0, 5.0, 4.0);
  // -3/8 + 1/2 + 5/4
  CHECK(eval(e, pt) == doctest::Approx(-0.375 + 0.5 + 1.25));
}

TEST_CASE("precedence and unary minus follow the grammar") {
  EvalPoint pt;
  pt.set(Var::X, 2.0);
  CHECK(eval(parse("2 + 3 * x"), pt) == doctest::Approx(8.0));
  CHECK(eval(parse("(2 + 3) * x"), pt) == doctest::Approx(10.0));
  CHECK(eval(parse("6 / 2 / 3"), pt) == doctest::Approx(1.0));
  // unary minus binds tighter than '^' under this grammar
  CHECK(eval(parse("-x^2"), pt) == doctest::Approx(4.0));
  CHECK(eval(parse("x^-1"), pt) == doctest::Approx(0.5));
  CHECK_THROWS_AS(parse("2 x"), ParseError);  // no implicit multiplication
}

TEST_CASE("diff of constants and polynomials") {
  CHECK(diff(Expr::constant(5.0), Var::X).is_constant(0.0));
  const Expr e = parse("p*q + q^2");
  const Expr de = diff(e, Var::Q);
  EvalPoint pt;
  pt.set(Var::P, 3.0).set(Var::Q, 7.0);
  CHECK(eval(de, pt) == doctest::Approx(3.0 + 14.0));
}

TEST_CASE("diff of the shifted quotient matches the closed form") {
  // d/dy (q - y)/x = -1/x, so 1 + x(a_y + q a_z) vanishes identically
  const Expr alpha = parse("(q - y)/x");
  const Expr ay = diff(alpha, Var::Y);
  const Expr az = diff(alpha, Var::Z);
  const Expr g = Expr::constant(1.0) +
                 Expr::variable(Var::X) * (ay + Expr::variable(Var::Q) * az);
  CHECK(is_identically_zero(g, Box::cube(1.0, 2.0)));
}

TEST_CASE("eval reports unbound variables and domain errors") {
  EvalPoint pt;
  pt.set(Var::Q, 3.0);
  CHECK(eval(parse("q"), pt) == doctest::Approx(3.0));
  CHECK_THROWS_AS(eval(parse("x"), pt), EvalError);
  pt.set(Var::X, 0.0);
  CHECK_THROWS_AS(eval(parse("1/x"), pt), EvalError);
  pt.set(Var::X, -1.0);
  CHECK_THROWS_AS(eval(parse("log(x)"), pt), EvalError);
  CHECK_THROWS_AS(eval(parse("sqrt(x)"), pt), EvalError);
  try {
    eval(parse("p + 1/x"), pt.set(Var::X, 0.0).set(Var::P, 1.0));
    FAIL("expected EvalError");
  } catch (const EvalError& e) {
    CHECK(std::string(e.what()).find("1/x") != std::string::npos);
  }
}

TEST_CASE("is_identically_zero accepts the involutive families") {
  // alpha = f(z - p x - q y, p, q) with f = u v
  const Expr u = parse("z - p*x - q*y");
  const Expr alpha = u * Expr::variable(Var::P);
  const Expr defect = diff(alpha, Var::X) +
                      Expr::variable(Var::P) * diff(alpha, Var::Z) -
                      alpha * (diff(alpha, Var::Y) +
                               Expr::variable(Var::Q) * diff(alpha, Var::Z));
  CHECK(is_identically_zero(defect, Box::cube(1.0, 2.0)));

  const Expr alpha2 = parse("-z/(q*x) + 1/x + p/q");
  const Expr disc = diff(alpha2, Var::P) +
                    Expr::variable(Var::X) * diff(alpha2, Var::Z);
  CHECK(is_identically_zero(disc, Box::cube(1.0, 2.0)));
}

TEST_CASE("is_identically_zero rejects nonzero functions") {
  CHECK_FALSE(is_identically_zero(parse("x"), Box::cube(1.0, 2.0)));
}

TEST_CASE("is_identically_zero reports a hopeless domain") {
  const Expr e = parse("1/(x - x)");
  CHECK_THROWS_AS(is_identically_zero(e, Box::cube(1.0, 2.0)), NumericError);
}

TEST_CASE("derivatives match central finite differences on random trees") {
  std::mt19937_64 rng(12345);
  const double h = 1e-5;
  int checked = 0;
  for (int i = 0; i < 1000; ++i) {
    const Expr e = random_expr(rng, 6);
    const Var v = static_cast<Var>(i % 5);
    const Expr de = diff(e, v);
    const EvalPoint pt = random_point(rng);
    try {
      const double x0 = *pt.get(v);
      EvalPoint lo = pt, hi = pt;
      lo.set(v, x0 - h);
      hi.set(v, x0 + h);
      const double fd = (eval(e, hi) - eval(e, lo)) / (2.0 * h);
      const double sym = eval(de, pt);
      CHECK(std::abs(fd - sym) <= 1e-6 * (1.0 + std::abs(sym)));
      ++checked;
    } catch (const EvalError&) {
      // tree hit a singularity at this point, skip
    }
  }
  CHECK(checked > 800);
}

TEST_CASE("print round-trips semantically") {
  std::mt19937_64 rng(777);
  for (int i = 0; i < 60; ++i) {
    const Expr e = random_expr(rng, 5);
    const Expr back = parse(to_string(e));
    for (int k = 0; k < 100; ++k) {
      const EvalPoint pt = random_point(rng);
      try {
        const double a = eval(e, pt);
        const double b = eval(back, pt);
        CHECK(std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a)));
      } catch (const EvalError&) {
      }
    }
  }
}

TEST_CASE("diff is linear") {
  std::mt19937_64 rng(4242);
  for (int i = 0; i < 50; ++i) {
    const Expr e1 = random_expr(rng, 4);
    const Expr e2 = random_expr(rng, 4);
    const double a = 1.7;
    const Expr lhs = diff(Expr::constant(a) * e1 + e2, Var::P);
    const Expr rhs = Expr::constant(a) * diff(e1, Var::P) + diff(e2, Var::P);
    for (int k = 0; k < 20; ++k) {
      const EvalPoint pt = random_point(rng);
      try {
        const double l = eval(lhs, pt);
        const double r = eval(rhs, pt);
        CHECK(std::abs(l - r) <= 1e-10 * (1.0 + std::abs(l)));
      } catch (const EvalError&) {
      }
    }
  }
}

TEST_CASE("mixed partials commute") {
  std::mt19937_64 rng(999);
  for (int i = 0; i < 40; ++i) {
    const Expr e = random_expr(rng, 4);
    const Expr dxy = diff(diff(e, Var::X), Var::Y);
    const Expr dyx = diff(diff(e, Var::Y), Var::X);
    for (int k = 0; k < 20; ++k) {
      const EvalPoint pt = random_point(rng);
      try {
        const double a = eval(dxy, pt);
        const double b = eval(dyx, pt);
        CHECK(std::abs(a - b) <= 1e-9 * (1.0 + std::abs(a)));
      } catch (const EvalError&) {
      }
    }
  }
}

TEST_CASE("eval tracks the dominant subterm scale") {
  EvalPoint pt;
  pt.set(Var::X, 1e8).set(Var::Y, 1e8);
  const auto r = eval_with_scale(parse("x - y"), pt);
  CHECK(r.value == 0.0);
  CHECK(r.scale >= 1e8);
}
