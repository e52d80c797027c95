#pragma once

#include <stdexcept>
#include <string>

namespace acdm {

// Bad caller input: dimension mismatches, invalid parameters, unreadable or
// malformed files.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// A run hit a non-finite value or a breakdown it cannot recover from.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace acdm
