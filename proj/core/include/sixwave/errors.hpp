#pragma once

#include <stdexcept>

namespace sixwave {

/// Thrown when a configuration is structurally or physically inconsistent.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when a numerical routine fails (singular system, divergent
/// integration, overflow); the message names the parameter point.
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

} // namespace sixwave
