#pragma once

#include <stdexcept>
#include <string>

namespace qhit {

/// Bad input to an operation (out-of-range symbol, short window, malformed matrix).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A configured cap (enumeration size, step count, operation budget) would be exceeded.
class ResourceLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The requested diagnostic is only defined for a narrower model family.
class UnsupportedConfiguration : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fixed-point circle arithmetic ran past its precision budget.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qhit
