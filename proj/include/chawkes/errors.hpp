#pragma once

#include <stdexcept>
#include <string>

namespace chawkes {

// Invalid parameters, malformed inputs, violated preconditions.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Divergence, non-convergence, non-finite intermediates.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace chawkes
