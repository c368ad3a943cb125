#pragma once

#include <stdexcept>

namespace kex {

// Bad configuration values: weights that do not sum to one, missing model
// inputs for a condition, out-of-range knobs.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input data (survey rows, snapshot files, parameter files).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Infeasible or numerically failed solves.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Filesystem failures; the message carries the offending path.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace kex
