#pragma once

#include <stdexcept>
#include <string>

namespace pdeblur {

/// Bad user input: invalid parameters, unreadable or malformed files.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A non-finite value appeared inside an iterative computation.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, int iteration)
      : std::runtime_error(what), iteration_(iteration) {}

  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

}  // namespace pdeblur
