#pragma once

#include <stdexcept>
#include <string>

namespace superrad {

/// Raised when a computation cannot produce a trustworthy number: integrator
/// step-size underflow, a missing root bracket, a fit window that never
/// forms, a singular block. Argument validation uses std::invalid_argument.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// A requested measurement budget that does not permit a single scan.
class InfeasibleBudget : public std::runtime_error {
 public:
  explicit InfeasibleBudget(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace superrad
