#pragma once

#include <stdexcept>
#include <string>

namespace dga {

// Bad input files, malformed records, invalid configuration. CLI exit code 2.
struct FormatError : std::runtime_error {
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite loss or gradient during optimization. CLI exit code 3.
struct DivergenceError : std::runtime_error {
  explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

// Checkpoint cannot be read or does not match the configured model. CLI exit code 4.
struct CheckpointError : std::runtime_error {
  explicit CheckpointError(const std::string& what) : std::runtime_error(what) {}
};

// Shape mismatch in linear algebra. Always a programming error, never user input.
struct DimensionError : std::invalid_argument {
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace dga
