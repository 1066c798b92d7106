#pragma once

#include <stdexcept>
#include <string>

namespace strucmix {

// Error taxonomy mirrored by the CLI exit codes: usage errors are handled by
// the argument parser, DataError maps to exit 2, NumericalError to exit 3.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : DataError {
  ParseError(const std::string& file, long line, const std::string& what)
      : DataError(file + ":" + std::to_string(line) + ": " + what),
        line_number(line) {}
  long line_number;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace strucmix
