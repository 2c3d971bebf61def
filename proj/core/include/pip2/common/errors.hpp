#pragma once

#include <stdexcept>
#include <string>

namespace pip2 {

/// Invalid configuration, shape mismatch, or malformed input file.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite values, solver blow-up, or a broken numerical invariant.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pip2
