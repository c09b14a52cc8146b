#pragma once

#include <stdexcept>
#include <string>

namespace langinc {

/// Malformed or inconsistent input data. Maps to exit code 2 in the CLI.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad invocation: unknown flag, missing required path. Exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace langinc
