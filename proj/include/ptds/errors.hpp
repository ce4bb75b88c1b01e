#pragma once

#include <stdexcept>
#include <string>

namespace ptds {

/// Malformed configuration, JSON document, or CLI input.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A point that was required to lie in the constraint set does not.
struct InfeasibleError : std::runtime_error {
  explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

/// Projection requested onto an empty tangent polyhedron (or empty union).
struct EmptyTangentError : std::runtime_error {
  explicit EmptyTangentError(const std::string& what) : std::runtime_error(what) {}
};

/// An iterative solver hit its cap before reaching tolerance.
struct ConvergenceError : std::runtime_error {
  explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace ptds
