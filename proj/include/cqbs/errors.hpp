#pragma once

#include <stdexcept>

namespace cqbs {

// input rejected up front: bad dimensions, non-unitary matrix, malformed config
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// work refused because it would blow past a configured resource cap
struct CapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// a postcondition this library guarantees did not hold; indicates a bug here
struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace cqbs
