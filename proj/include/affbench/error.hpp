#pragma once

#include <stdexcept>
#include <string>

namespace affbench {

/// Vector length does not match the problem dimension.
struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct UnsupportedFunction : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Invalid experiment or algorithm configuration (CLI exit code 2).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A base function produced NaN or infinity.
struct NonFiniteValue : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The random stream kept producing degenerate rotation columns.
struct DegenerateStream : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed input file; the message names the file and line (CLI exit code 3).
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Filesystem failure while reading or writing (CLI exit code 3).
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace affbench
