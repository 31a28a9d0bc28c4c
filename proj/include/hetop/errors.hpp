#pragma once

#include <stdexcept>
#include <string>

namespace hetop {

// Invalid or inconsistent input data (bad tables, malformed files, ...).
struct data_error : std::runtime_error {
  explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Parameters violate an identification constraint beyond tolerance.
struct constraint_error : std::invalid_argument {
  explicit constraint_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// Objective not finite at the starting point.
struct initialization_error : std::runtime_error {
  explicit initialization_error(const std::string& msg) : std::runtime_error(msg) {}
};

// An operation was called on inputs that do not satisfy its preconditions
// (e.g. standard errors requested for a non-converged fit).
struct precondition_error : std::logic_error {
  explicit precondition_error(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace hetop
