#include "gmae/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <random>
#include <utility>

namespace gmae {

namespace {
constexpr char kVarChars[kVarCount + 1] = "xyzpqstuvw";
constexpr const char* kFuncNames[6] = {"sin", "cos", "exp", "log", "sqrt", "abs"};
}  // namespace

char var_char(Var v) { return kVarChars[static_cast<int>(v)]; }

std::optional<Var> var_from_char(char c) {
  for (int i = 0; i < kVarCount; ++i) {
    if (kVarChars[i] == c) return static_cast<Var>(i);
  }
  return std::nullopt;
}

const char* func_name(Func f) { return kFuncNames[static_cast<int>(f)]; }

struct Expr::Node {
  Kind kind;
  double value = 0.0;      // Constant
  Var var = Var::X;        // Variable
  Func func = Func::Sin;   // Call
  int exponent = 0;        // Power
  std::vector<Expr> kids;
};

Expr Expr::make(Node n) {
  return Expr(std::make_shared<const Node>(std::move(n)));
}

Expr::Expr() : Expr(constant(0.0)) {}

Expr Expr::constant(double value) {
  Node n;
  n.kind = Kind::Constant;
  n.value = value;
  return make(std::move(n));
}

Expr Expr::variable(Var v) {
  Node n;
  n.kind = Kind::Variable;
  n.var = v;
  return make(std::move(n));
}

Expr::Kind Expr::kind() const { return node_->kind; }
double Expr::constant_value() const { return node_->value; }
Var Expr::var() const { return node_->var; }
Func Expr::func() const { return node_->func; }
int Expr::exponent() const { return node_->exponent; }
const std::vector<Expr>& Expr::children() const { return node_->kids; }

bool Expr::is_constant(double value) const {
  return kind() == Kind::Constant && constant_value() == value;
}

Expr Expr::sum(std::vector<Expr> terms) {
  std::vector<Expr> kept;
  double folded = 0.0;
  for (auto& t : terms) {
    if (t.is_constant()) {
      folded += t.constant_value();
    } else if (t.kind() == Kind::Sum) {
      for (const auto& k : t.children()) {
        if (k.is_constant()) {
          folded += k.constant_value();
        } else {
          kept.push_back(k);
        }
      }
    } else {
      kept.push_back(std::move(t));
    }
  }
  if (folded != 0.0 || kept.empty()) kept.push_back(constant(folded));
  if (kept.size() == 1) return kept.front();
  Node n;
  n.kind = Kind::Sum;
  n.kids = std::move(kept);
  return make(std::move(n));
}

Expr Expr::product(std::vector<Expr> factors) {
  std::vector<Expr> kept;
  double folded = 1.0;
  for (auto& f : factors) {
    if (f.is_constant()) {
      folded *= f.constant_value();
    } else if (f.kind() == Kind::Product) {
      for (const auto& k : f.children()) {
        if (k.is_constant()) {
          folded *= k.constant_value();
        } else {
          kept.push_back(k);
        }
      }
    } else {
      kept.push_back(std::move(f));
    }
  }
  if (folded == 0.0) return constant(0.0);
  if (folded != 1.0 || kept.empty()) {
    kept.insert(kept.begin(), constant(folded));
  }
  if (kept.size() == 1) return kept.front();
  Node n;
  n.kind = Kind::Product;
  n.kids = std::move(kept);
  return make(std::move(n));
}

Expr Expr::quotient(Expr numerator, Expr denominator) {
  if (numerator.is_constant(0.0)) return constant(0.0);
  if (denominator.is_constant(1.0)) return numerator;
  if (numerator.is_constant() && denominator.is_constant() &&
      denominator.constant_value() != 0.0) {
    return constant(numerator.constant_value() / denominator.constant_value());
  }
  Node n;
  n.kind = Kind::Quotient;
  n.kids = {std::move(numerator), std::move(denominator)};
  return make(std::move(n));
}

Expr Expr::power(Expr base, int exponent) {
  if (exponent == 0) return constant(1.0);
  if (exponent == 1) return base;
  if (base.is_constant() && !(base.constant_value() == 0.0 && exponent < 0)) {
    return constant(std::pow(base.constant_value(), exponent));
  }
  Node n;
  n.kind = Kind::Power;
  n.exponent = exponent;
  n.kids = {std::move(base)};
  return make(std::move(n));
}

Expr Expr::call(Func f, Expr arg) {
  if (arg.is_constant()) {
    const double a = arg.constant_value();
    switch (f) {
      case Func::Sin: return constant(std::sin(a));
      case Func::Cos: return constant(std::cos(a));
      case Func::Exp: return constant(std::exp(a));
      case Func::Log:
        if (a > 0.0) return constant(std::log(a));
        break;  // leave symbolic, error surfaces at eval
      case Func::Sqrt:
        if (a >= 0.0) return constant(std::sqrt(a));
        break;
      case Func::Abs: return constant(std::abs(a));
    }
  }
  Node n;
  n.kind = Kind::Call;
  n.func = f;
  n.kids = {std::move(arg)};
  return make(std::move(n));
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::sum({a, b}); }
Expr operator-(const Expr& a, const Expr& b) {
  return Expr::sum({a, Expr::product({Expr::constant(-1.0), b})});
}
Expr operator*(const Expr& a, const Expr& b) { return Expr::product({a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::quotient(a, b); }
Expr operator-(const Expr& a) {
  return Expr::product({Expr::constant(-1.0), a});
}

Expr pow(const Expr& base, int exponent) { return Expr::power(base, exponent); }
Expr sin(const Expr& e) { return Expr::call(Func::Sin, e); }
Expr cos(const Expr& e) { return Expr::call(Func::Cos, e); }
Expr exp(const Expr& e) { return Expr::call(Func::Exp, e); }
Expr log(const Expr& e) { return Expr::call(Func::Log, e); }
Expr sqrt(const Expr& e) { return Expr::call(Func::Sqrt, e); }
Expr abs(const Expr& e) { return Expr::call(Func::Abs, e); }

EvalPoint& EvalPoint::set(Var v, double value) {
  value_[static_cast<int>(v)] = value;
  bound_[static_cast<int>(v)] = true;
  return *this;
}

std::optional<double> EvalPoint::get(Var v) const {
  if (!bound_[static_cast<int>(v)]) return std::nullopt;
  return value_[static_cast<int>(v)];
}

bool EvalPoint::bound(Var v) const { return bound_[static_cast<int>(v)]; }

EvalPoint EvalPoint::jet(double x, double y, double z, double p, double q) {
  EvalPoint pt;
  pt.set(Var::X, x).set(Var::Y, y).set(Var::Z, z).set(Var::P, p).set(Var::Q, q);
  return pt;
}

namespace {

double ipow(double base, int n) {
  // exact for moderate integer exponents, no pow() branch cuts
  if (n < 0) return 1.0 / ipow(base, -n);
  double r = 1.0;
  double b = base;
  while (n > 0) {
    if (n & 1) r *= b;
    b *= b;
    n >>= 1;
  }
  return r;
}

[[noreturn]] void eval_fail(const std::string& what, const Expr& sub) {
  throw EvalError(what + " in '" + to_string(sub) + "'");
}

double eval_rec(const Expr& e, const EvalPoint& at, double& scale) {
  double v = 0.0;
  switch (e.kind()) {
    case Expr::Kind::Constant:
      v = e.constant_value();
      break;
    case Expr::Kind::Variable: {
      auto b = at.get(e.var());
      if (!b) {
        eval_fail(std::string("unbound variable '") + var_char(e.var()) + "'",
                  e);
      }
      v = *b;
      break;
    }
    case Expr::Kind::Sum: {
      for (const auto& k : e.children()) v += eval_rec(k, at, scale);
      break;
    }
    case Expr::Kind::Product: {
      v = 1.0;
      for (const auto& k : e.children()) v *= eval_rec(k, at, scale);
      break;
    }
    case Expr::Kind::Quotient: {
      const double num = eval_rec(e.children()[0], at, scale);
      const double den = eval_rec(e.children()[1], at, scale);
      if (den == 0.0) eval_fail("division by zero", e);
      v = num / den;
      break;
    }
    case Expr::Kind::Power: {
      const double base = eval_rec(e.children()[0], at, scale);
      if (base == 0.0 && e.exponent() < 0) eval_fail("division by zero", e);
      v = ipow(base, e.exponent());
      break;
    }
    case Expr::Kind::Call: {
      const double a = eval_rec(e.children()[0], at, scale);
      switch (e.func()) {
        case Func::Sin: v = std::sin(a); break;
        case Func::Cos: v = std::cos(a); break;
        case Func::Exp: v = std::exp(a); break;
        case Func::Log:
          if (a <= 0.0) eval_fail("log of a non-positive value", e);
          v = std::log(a);
          break;
        case Func::Sqrt:
          if (a < 0.0) eval_fail("sqrt of a negative value", e);
          v = std::sqrt(a);
          break;
        case Func::Abs: v = std::abs(a); break;
      }
      break;
    }
  }
  if (!std::isfinite(v)) eval_fail("non-finite value", e);
  const double m = std::abs(v);
  if (m > scale) scale = m;
  return v;
}

}  // namespace

double eval(const Expr& e, const EvalPoint& at) {
  double scale = 0.0;
  return eval_rec(e, at, scale);
}

EvalResult eval_with_scale(const Expr& e, const EvalPoint& at) {
  double scale = 0.0;
  const double v = eval_rec(e, at, scale);
  return {v, scale};
}

Expr diff(const Expr& e, Var v) {
  switch (e.kind()) {
    case Expr::Kind::Constant:
      return Expr::constant(0.0);
    case Expr::Kind::Variable:
      return Expr::constant(e.var() == v ? 1.0 : 0.0);
    case Expr::Kind::Sum: {
      std::vector<Expr> terms;
      terms.reserve(e.children().size());
      for (const auto& k : e.children()) terms.push_back(diff(k, v));
      return Expr::sum(std::move(terms));
    }
    case Expr::Kind::Product: {
      // Leibniz over the n-ary factor list
      std::vector<Expr> terms;
      const auto& kids = e.children();
      for (std::size_t i = 0; i < kids.size(); ++i) {
        std::vector<Expr> factors;
        factors.reserve(kids.size());
        for (std::size_t j = 0; j < kids.size(); ++j) {
          factors.push_back(j == i ? diff(kids[j], v) : kids[j]);
        }
        terms.push_back(Expr::product(std::move(factors)));
      }
      return Expr::sum(std::move(terms));
    }
    case Expr::Kind::Quotient: {
      const Expr& a = e.children()[0];
      const Expr& b = e.children()[1];
      return (diff(a, v) * b - a * diff(b, v)) / Expr::power(b, 2);
    }
    case Expr::Kind::Power: {
      const Expr& base = e.children()[0];
      const int n = e.exponent();
      return Expr::constant(n) * Expr::power(base, n - 1) * diff(base, v);
    }
    case Expr::Kind::Call: {
      const Expr& a = e.children()[0];
      const Expr da = diff(a, v);
      switch (e.func()) {
        case Func::Sin: return cos(a) * da;
        case Func::Cos: return -sin(a) * da;
        case Func::Exp: return exp(a) * da;
        case Func::Log: return da / a;
        case Func::Sqrt:
          return da / (Expr::constant(2.0) * sqrt(a));
        case Func::Abs: return (a / abs(a)) * da;
      }
    }
  }
  return Expr::constant(0.0);  // unreachable
}

namespace {

// precedence levels: Sum 1, Product/Quotient 2, Power 3, atoms 4
int precedence(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Sum: return 1;
    case Expr::Kind::Product:
    case Expr::Kind::Quotient: return 2;
    case Expr::Kind::Power: return 3;
    default: return 4;
  }
}

void format_double(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

void print_rec(std::string& out, const Expr& e, int min_prec) {
  const bool parens = precedence(e) < min_prec;
  if (parens) out += '(';
  switch (e.kind()) {
    case Expr::Kind::Constant:
      format_double(out, e.constant_value());
      break;
    case Expr::Kind::Variable:
      out += var_char(e.var());
      break;
    case Expr::Kind::Sum: {
      bool first = true;
      for (const auto& k : e.children()) {
        if (!first) out += " + ";
        print_rec(out, k, 2);
        first = false;
      }
      break;
    }
    case Expr::Kind::Product: {
      bool first = true;
      for (const auto& k : e.children()) {
        if (!first) out += '*';
        // quotients keep their own parens so a*(b/c) reparses exactly
        print_rec(out, k, k.kind() == Expr::Kind::Quotient ? 4 : 3);
        first = false;
      }
      break;
    }
    case Expr::Kind::Quotient:
      print_rec(out, e.children()[0], 3);
      out += '/';
      print_rec(out, e.children()[1], 4);
      break;
    case Expr::Kind::Power: {
      print_rec(out, e.children()[0], 4);
      out += '^';
      out += std::to_string(e.exponent());
      break;
    }
    case Expr::Kind::Call:
      out += func_name(e.func());
      out += '(';
      print_rec(out, e.children()[0], 0);
      out += ')';
      break;
  }
  if (parens) out += ')';
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print_rec(out, e, 0);
  return out;
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  Expr run() {
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected trailing input", pos_);
    return e;
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what, std::size_t at) {
    throw ParseError(what, at);
  }

  void skip_ws() {
    while (pos_ < src_.size() &&
           std::isspace(static_cast<unsigned char>(src_[pos_]))) {
      ++pos_;
    }
  }

  bool peek_is(char c) {
    skip_ws();
    return pos_ < src_.size() && src_[pos_] == c;
  }

  bool eat(char c) {
    if (peek_is(c)) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'", pos_);
  }

  Expr parse_expr() {
    Expr e = parse_term();
    for (;;) {
      if (eat('+')) {
        e = e + parse_term();
      } else if (eat('-')) {
        e = e - parse_term();
      } else {
        return e;
      }
    }
  }

  Expr parse_term() {
    Expr e = parse_factor();
    for (;;) {
      if (eat('*')) {
        e = e * parse_factor();
      } else if (eat('/')) {
        e = e / parse_factor();
      } else {
        return e;
      }
    }
  }

  Expr parse_factor() {
    Expr base = parse_base();
    if (eat('^')) return Expr::power(base, parse_int_exponent());
    return base;
  }

  Expr parse_base() {
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end of input", pos_);
    const char c = src_[pos_];
    if (c == '-') {
      ++pos_;
      return -parse_base();
    }
    if (c == '(') {
      ++pos_;
      Expr e = parse_expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return parse_number();
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      return parse_ident();
    }
    fail(std::string("unexpected character '") + c + "'", pos_);
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
      ++pos_;
    }
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (pos_ < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        ++pos_;
      }
    }
    // exponent part only when a digit actually follows
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t probe = pos_ + 1;
      if (probe < src_.size() && (src_[probe] == '+' || src_[probe] == '-')) {
        ++probe;
      }
      if (probe < src_.size() &&
          std::isdigit(static_cast<unsigned char>(src_[probe]))) {
        pos_ = probe;
        while (pos_ < src_.size() &&
               std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
          ++pos_;
        }
      }
    }
    if (pos_ == start) fail("expected a number", start);
    const std::string text(src_.substr(start, pos_ - start));
    return Expr::constant(std::strtod(text.c_str(), nullptr));
  }

  Expr parse_ident() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
            src_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view word = src_.substr(start, pos_ - start);
    if (word.size() == 1) {
      if (auto v = var_from_char(word[0])) return Expr::variable(*v);
    }
    for (int f = 0; f < 6; ++f) {
      if (word == kFuncNames[f]) {
        expect('(');
        Expr arg = parse_expr();
        expect(')');
        return Expr::call(static_cast<Func>(f), std::move(arg));
      }
    }
    fail("unknown identifier '" + std::string(word) + "'", start);
  }

  int parse_int_exponent() {
    skip_ws();
    const std::size_t start = pos_;
    bool neg = false;
    if (pos_ < src_.size() && (src_[pos_] == '-' || src_[pos_] == '+')) {
      neg = src_[pos_] == '-';
      ++pos_;
    }
    std::size_t digits = pos_;
    long value = 0;
    while (pos_ < src_.size() &&
           std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
      value = value * 10 + (src_[pos_] - '0');
      if (value > 1000000) fail("exponent too large", start);
      ++pos_;
    }
    if (pos_ == digits) fail("exponent must be an integer", start);
    if (pos_ < src_.size() && src_[pos_] == '.') {
      fail("exponent must be an integer", start);
    }
    return static_cast<int>(neg ? -value : value);
  }
};

void collect_free_vars(const Expr& e, std::bitset<kVarCount>& out) {
  if (e.kind() == Expr::Kind::Variable) {
    out.set(static_cast<int>(e.var()));
    return;
  }
  for (const auto& k : e.children()) collect_free_vars(k, out);
}

}  // namespace

Expr parse(std::string_view source) { return Parser(source).run(); }

std::bitset<kVarCount> free_vars(const Expr& e) {
  std::bitset<kVarCount> out;
  collect_free_vars(e, out);
  return out;
}

Box Box::cube(double lo, double hi) {
  Box b;
  for (auto& r : b.range) r = {lo, hi};
  return b;
}

Box& Box::set(Var v, double lo, double hi) {
  range[static_cast<int>(v)] = {lo, hi};
  return *this;
}

bool is_identically_zero(const Expr& e, const Box& box,
                         const ZeroTestOptions& opt) {
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto vars = free_vars(e);
  int redraws = 0;
  for (int i = 0; i < opt.samples; ++i) {
    for (;;) {
      EvalPoint pt;
      for (int v = 0; v < kVarCount; ++v) {
        if (!vars.test(v)) continue;
        const auto [lo, hi] = box.range[v];
        pt.set(static_cast<Var>(v), lo + (hi - lo) * unit(rng));
      }
      try {
        const auto r = eval_with_scale(e, pt);
        if (std::abs(r.value) > opt.tol * (1.0 + r.scale)) return false;
        break;
      } catch (const EvalError&) {
        if (++redraws > opt.max_redraws) {
          throw NumericError(
              "is_identically_zero: sampling retry budget exhausted, "
              "domain too singular");
        }
      }
    }
  }
  return true;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> xs(static_cast<std::size_t>(n));
  if (n == 1) {
    xs[0] = a;
    return xs;
  }
  const double h = (b - a) / (n - 1);
  for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i)] = a + h * i;
  xs.back() = b;
  return xs;
}

}  // namespace gmae
