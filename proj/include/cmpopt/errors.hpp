#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cmpopt {

/// Precondition violation on an argument (non-finite input, zero sizes, dimension mismatch).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Probability argument outside the open unit interval.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Series evaluation outside its fit interval.
class OutOfRange : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Estimator configuration that violates a finite-variance condition.
class ValidityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The coefficient engine could not reach the requested tolerance.
class FitFailure : public std::runtime_error {
 public:
  FitFailure(const std::string& what, double best_residual)
      : std::runtime_error(what), best_residual_(best_residual) {}
  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

/// Iteration budget does not fit in a 64-bit counter.
class BudgetTooLarge : public std::overflow_error {
 public:
  BudgetTooLarge(const std::string& what, double requested)
      : std::overflow_error(what), requested_(requested) {}
  double requested() const noexcept { return requested_; }

 private:
  double requested_;
};

/// SGD produced a non-finite iterate.
class RunFailure : public std::runtime_error {
 public:
  RunFailure(const std::string& what, std::vector<double> last_finite, long long iteration)
      : std::runtime_error(what), last_finite_(std::move(last_finite)), iteration_(iteration) {}
  const std::vector<double>& last_finite_iterate() const noexcept { return last_finite_; }
  long long iteration() const noexcept { return iteration_; }

 private:
  std::vector<double> last_finite_;
  long long iteration_;
};

/// Bad or unknown configuration key. Maps to exit code 2 in the CLI.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cmpopt
