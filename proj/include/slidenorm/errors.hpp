#pragma once

#include <stdexcept>
#include <string>

namespace slidenorm {

// Item id or index outside the configured universe.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Bad configuration or argument value.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed input data (non-finite values, wrong row width, bad file).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Requested norm or grid does not fit the configured capacity.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical failure: bracketing, LP, non-convergence that cannot be recovered.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace slidenorm
