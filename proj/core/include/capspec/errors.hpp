#pragma once

#include <stdexcept>
#include <string>

namespace capspec {

// Invalid input (angle out of range, lambda <= 1, ...). CLI maps this to exit code 2.
class DomainError : public std::runtime_error {
public:
  explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// An iterative method failed to converge (bracketing, collocation, eigensolve).
// CLI maps this to exit code 3.
class ConvergenceError : public std::runtime_error {
public:
  explicit ConvergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

// Mesh generation produced (or was asked to produce) invalid geometry.
class GeometryError : public std::runtime_error {
public:
  explicit GeometryError(const std::string& msg) : std::runtime_error(msg) {}
};

// A request would exceed sane resource limits (e.g. absurd vertex counts).
class ResourceError : public std::runtime_error {
public:
  explicit ResourceError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace capspec
