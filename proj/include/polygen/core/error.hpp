#pragma once

#include <stdexcept>
#include <string>

namespace polygen {

// Bad/missing input files, malformed manifests, inconsistent shapes coming
// from user data. CLI maps this to exit code 3.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite losses or similar runtime numeric failures. CLI exit code 4.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace polygen
