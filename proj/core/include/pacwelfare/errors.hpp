#pragma once

#include <stdexcept>
#include <string>

namespace pacwelfare {

// Bad input data, bad flags, or a violated precondition. Maps to exit code 2.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical routine failed to converge or produced a non-finite value.
// Maps to exit code 3.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pacwelfare
