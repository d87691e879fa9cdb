#ifndef GMAE_EXPR_HPP
#define GMAE_EXPR_HPP

#include <array>
#include <bitset>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gmae/errors.hpp"

namespace gmae {

/// Chart and parameter variables. The first five are the jet-chart
/// coordinates; s,t parametrize surfaces and seed curves; u,v,w are
/// spare slots for user-defined families.
enum class Var : int { X = 0, Y, Z, P, Q, S, T, U, V, W };

inline constexpr int kVarCount = 10;

char var_char(Var v);
std::optional<Var> var_from_char(char c);

enum class Func : int { Sin = 0, Cos, Exp, Log, Sqrt, Abs };

const char* func_name(Func f);

/// Immutable symbolic expression over the ten chart variables.
///
/// Nodes: real constant, variable, n-ary sum, n-ary product, quotient,
/// integer power, unary function call. Construction applies only local
/// constant folding and the 0/1 identities; there is no canonical form
/// and no like-term cancellation. Values are freely shareable across
/// threads.
class Expr {
 public:
  enum class Kind { Constant, Variable, Sum, Product, Quotient, Power, Call };

  Expr();  // constant 0

  static Expr constant(double value);
  static Expr variable(Var v);
  static Expr sum(std::vector<Expr> terms);
  static Expr product(std::vector<Expr> factors);
  static Expr quotient(Expr numerator, Expr denominator);
  static Expr power(Expr base, int exponent);
  static Expr call(Func f, Expr arg);

  Kind kind() const;
  double constant_value() const;           // Kind::Constant only
  Var var() const;                         // Kind::Variable only
  Func func() const;                       // Kind::Call only
  int exponent() const;                    // Kind::Power only
  const std::vector<Expr>& children() const;

  bool is_constant() const { return kind() == Kind::Constant; }
  bool is_constant(double value) const;

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Expr make(Node n);
  std::shared_ptr<const Node> node_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);

Expr pow(const Expr& base, int exponent);
Expr sin(const Expr& e);
Expr cos(const Expr& e);
Expr exp(const Expr& e);
Expr log(const Expr& e);
Expr sqrt(const Expr& e);
Expr abs(const Expr& e);

/// Variable bindings for evaluation. Every free variable of the
/// expression being evaluated must be bound.
class EvalPoint {
 public:
  EvalPoint& set(Var v, double value);
  std::optional<double> get(Var v) const;
  bool bound(Var v) const;

  /// Binds the five jet-chart coordinates.
  static EvalPoint jet(double x, double y, double z, double p, double q);

 private:
  std::array<double, kVarCount> value_{};
  std::array<bool, kVarCount> bound_{};
};

struct EvalResult {
  double value;
  double scale;  // max |subterm| encountered during evaluation
};

/// Recursive IEEE-double evaluation. Throws EvalError on an unbound
/// variable or a domain error; the message quotes the offending
/// subexpression.
double eval(const Expr& e, const EvalPoint& at);
EvalResult eval_with_scale(const Expr& e, const EvalPoint& at);

/// Exact symbolic partial derivative. Total on well-formed trees.
Expr diff(const Expr& e, Var v);

/// Precedence-aware printing. parse(to_string(e)) evaluates equal to e.
std::string to_string(const Expr& e);

/// Recursive-descent parser for the grammar
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := base ('^' integer)?
///   base   := number | ident | func '(' expr ')' | '(' expr ')' | '-' base
/// with func in {sin,cos,exp,log,sqrt,abs} and ident in {x,y,z,p,q,s,t,u,v,w}.
/// Whitespace-insensitive; implicit multiplication is not allowed.
Expr parse(std::string_view source);

std::bitset<kVarCount> free_vars(const Expr& e);

/// Axis-aligned sampling box, one interval per variable.
struct Box {
  std::array<std::pair<double, double>, kVarCount> range;

  static Box cube(double lo, double hi);
  Box& set(Var v, double lo, double hi);
};

struct ZeroTestOptions {
  int samples = 200;
  double tol = 1e-9;             // relative, scale-aware
  std::uint64_t seed = 0x9e3779b97f4a7c15ull;
  int max_redraws = 2000;        // total budget for resampling domain errors
};

/// Probabilistic test that `e` vanishes identically on `box`: true iff
/// |eval| <= tol*(1+scale) at every drawn sample, where scale is the
/// largest subterm magnitude at that sample. Samples hitting domain
/// errors are redrawn; exhausting the redraw budget throws NumericError.
bool is_identically_zero(const Expr& e, const Box& box,
                         const ZeroTestOptions& opt = {});

/// Uniform grid helper used by surface and scan code.
std::vector<double> linspace(double a, double b, int n);

}  // namespace gmae

#endif
