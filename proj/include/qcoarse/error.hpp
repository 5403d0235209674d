#pragma once

#include <stdexcept>
#include <string>

namespace qcoarse {

// Bad parameters, malformed job files, mismatched dimensions.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// An adaptive numerical procedure failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qcoarse
