#ifndef GMAE_ERRORS_HPP
#define GMAE_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gmae {

/// Syntax error while parsing expression text. `offset` is the byte
/// position in the source string where the error was detected.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Evaluation failure: unbound variable or a domain error (division by
/// zero, log of a non-positive value, ...). The message names the
/// offending subexpression.
class EvalError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numeric algorithm failure: Newton divergence, singular Jacobian,
/// exhausted sampling retries, ODE right-hand-side breakdown.
class NumericError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace gmae

#endif
