#pragma once

#include <stdexcept>
#include <string>

namespace sbrnn {

/// Raised for invalid parameters, inconsistent dimensions and malformed files.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a numerical routine produces a non-finite value.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ConfigError(message);
}

}  // namespace sbrnn
