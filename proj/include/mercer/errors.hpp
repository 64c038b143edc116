#pragma once

#include <stdexcept>
#include <string>

namespace mercer {

/// Malformed arguments (bad sizes, mismatched domains, unknown names).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A point was supplied outside the function's domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A user-supplied evaluator returned NaN or an infinite value.
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(const std::string& what, double abscissa)
      : std::runtime_error(what), abscissa_(abscissa) {}

  double abscissa() const noexcept { return abscissa_; }

 private:
  double abscissa_;
};

/// A closed-form bound was queried outside the range where it holds.
class OutOfValidity : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A construction whose exact form would overflow double precision.
class UnsupportedScale : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A loaded object violates a structural invariant.
class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mercer
