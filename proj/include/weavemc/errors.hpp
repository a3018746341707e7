#pragma once

#include <stdexcept>

namespace weavemc {

// Invalid user-facing configuration (bad flags, malformed files, incompatible
// kernel/target pairs). The CLI maps this to exit code 1.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A computation degenerated numerically (non-finite gradient, singular
// covariance, vanishing level-set gradient). The CLI maps this to exit code 2.
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace weavemc
