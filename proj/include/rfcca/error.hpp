#pragma once

#include <stdexcept>
#include <string>

namespace rfcca {

// Invalid argument to a library operation (shape mismatch, out-of-range value).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Inconsistent experiment configuration; maps to CLI exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Unreadable, empty or degenerate input data; maps to CLI exit code 3.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Singular systems, non-finite values, failed factorizations; exit code 4.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rfcca
