#pragma once

#include <stdexcept>
#include <string>

namespace spacedet {

/// File-system or asset access failure. Maps to CLI exit code 3.
struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed input file (bad JSON, wrong schema). Maps to CLI exit code 2.
struct parse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Tensor/raster dimension mismatch, reports expected vs actual.
struct shape_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Sprite placement impossible (out of frame bounds or unsatisfiable config).
struct placement_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Optimization produced a non-finite loss. Maps to CLI exit code 4.
struct divergence_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace spacedet
