#pragma once

#include <stdexcept>
#include <string>

namespace doptrack {

/// Invalid parameters or malformed configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// File access or parse failure.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite values reaching a numerical routine.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace doptrack
