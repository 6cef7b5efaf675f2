#ifndef ZO_ERRORS_HPP
#define ZO_ERRORS_HPP

#include <stdexcept>
#include <string>

#include "zo/types.hpp"

namespace zo {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition of the API was not met (dimension mismatch, m = 0, ...).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// An input was outside the mathematical domain (non-finite point, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Non-finite value produced during a computation.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Requested reference quantity is not defined for a problem family.
class NotAvailable : public Error {
 public:
  using Error::Error;
};

// An inner iteration hit its cap before its stopping test held.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(const std::string& what, Vector best, double final_value, long iterations)
      : Error(what), best_(std::move(best)), final_value_(final_value), iterations_(iterations) {}

  const Vector& best() const { return best_; }
  // ICG: last h value. Cubic subsolver: last first-order residual.
  double final_value() const { return final_value_; }
  long iterations() const { return iterations_; }

 private:
  Vector best_;
  double final_value_;
  long iterations_;
};

// Raised by the unconstrained solvers when ||x||_inf exceeds the guard.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, long iteration, double norm, std::string trace = {})
      : Error(what), iteration_(iteration), norm_(norm), trace_(std::move(trace)) {}
  long iteration() const { return iteration_; }
  double norm() const { return norm_; }
  // Trace CSV of the iterations completed before the guard fired.
  const std::string& trace() const { return trace_; }

 private:
  long iteration_;
  double norm_;
  std::string trace_;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ContractViolation(message);
}

}  // namespace zo

#endif  // ZO_ERRORS_HPP
