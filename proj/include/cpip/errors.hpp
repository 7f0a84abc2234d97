#pragma once

#include <stdexcept>

namespace cpip {

// Invalid configuration or misuse of an operation (CLI exit code 2).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Malformed or insufficient data (CLI exit code 3).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical degeneracy: underflowed kernels, zero EIF variance (CLI exit code 4).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace cpip
