#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fracosc {

// Input outside an operation's mathematical domain (poles, inadmissible
// exponents, out-of-range orders). CLI exit code 2.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// A coordinate on or outside the boundary of the positive orthant.
class SingularityError : public DomainError {
public:
  using DomainError::DomainError;
};

// A matrix that must be invertible is not (metric, fundamental tensor, chart Jacobian).
class RankError : public DomainError {
public:
  using DomainError::DomainError;
};

// A series failed to converge inside its term budget. CLI exit code 3.
class AccuracyError : public std::runtime_error {
public:
  AccuracyError(const std::string& what, double last_term)
      : std::runtime_error(what), last_term_(last_term) {}
  double last_term() const noexcept { return last_term_; }

private:
  double last_term_;
};

// Parse failure with a 1-based source position. CLI exit code 1.
class SyntaxError : public std::runtime_error {
public:
  SyntaxError(const std::string& what, std::size_t line, std::size_t column, std::string expected)
      : std::runtime_error(what), line_(line), column_(column), expected_(std::move(expected)) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::string& expected() const noexcept { return expected_; }

private:
  std::size_t line_;
  std::size_t column_;
  std::string expected_;
};

// Runtime evaluation failure: unbound variable, division by zero, Gamma pole.
class EvalError : public DomainError {
public:
  using DomainError::DomainError;
};

// Expression outside the exactly-differentiable monomial fragment.
class UnsupportedForm : public DomainError {
public:
  using DomainError::DomainError;
};

// The fractional ODE integrator could not continue.
class SolverError : public DomainError {
public:
  SolverError(const std::string& what, double last_good_t)
      : DomainError(what), last_good_t_(last_good_t) {}
  double last_good_t() const noexcept { return last_good_t_; }

private:
  double last_good_t_;
};

}  // namespace fracosc
