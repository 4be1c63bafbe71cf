#pragma once

#include <stdexcept>
#include <string>

namespace ssep {

/// Malformed input: bad vertex word, out-of-range parameter, bad file.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A configured state-space or size cap would be exceeded.
class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A statistic that requires a centered local function got an uncentered one.
class NotCentered : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Numerical failure that should be impossible for valid inputs.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace ssep
