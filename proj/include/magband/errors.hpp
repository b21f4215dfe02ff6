#pragma once

#include <stdexcept>
#include <string>

namespace magband {

// Raised when an iterative or discretized computation fails to reach its
// stated tolerance (basis non-convergence, quadrature instability,
// near-degenerate eigenpairs, truncation-tail overflow, ...).
class numerics_error : public std::runtime_error {
 public:
  explicit numerics_error(const std::string& what) : std::runtime_error(what) {}
};

// Raised on invalid run configuration; the message names the field path.
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace magband
