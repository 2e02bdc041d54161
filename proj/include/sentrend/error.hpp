#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sentrend {

// Base for every error raised by the library. `exit_code()` is what the CLI
// returns when the error escapes a subcommand.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 1; }
};

// Caller broke a documented precondition (dimension mismatch, k out of
// range, non-finite input).
class ContractViolation : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

class IoError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

// Input parsed but does not look like the expected record schema.
class SchemaError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 4; }
};

class InsufficientData : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 5; }
};

// Iterative solver hit its iteration cap. Carries the best iterate found so
// callers can inspect or use it.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> best_iterate,
                   double violation)
      : Error(what), best_iterate_(std::move(best_iterate)), violation_(violation) {}

  const std::vector<double>& best_iterate() const noexcept { return best_iterate_; }
  double violation() const noexcept { return violation_; }
  int exit_code() const noexcept override { return 6; }

 private:
  std::vector<double> best_iterate_;
  double violation_;
};

class SelectionError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 7; }
};

}  // namespace sentrend
