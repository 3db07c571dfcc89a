#pragma once

#include <stdexcept>

namespace wcount {

// A series or quadrature evaluation could not reach its accuracy contract.
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A table build or tail-closure loop would exceed its configured ceiling.
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A likelihood evaluation failed at the requested parameter point.
struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace wcount
