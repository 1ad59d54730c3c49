#pragma once

#include <stdexcept>
#include <string>

namespace polylab {

// Domain violations (bad arguments, out-of-range parameters) are reported with
// std::domain_error directly. The two classes below cover the remaining
// failure modes that callers need to tell apart.

/// Thrown when an enumeration or materialization would exceed its guard.
class SizeError : public std::length_error {
 public:
  explicit SizeError(const std::string& what) : std::length_error(what) {}
};

/// Thrown when an iterative method fails to converge (iteration caps,
/// singular refactorizations, degenerate inputs with no finite answer).
class NumericalFailure : public std::runtime_error {
 public:
  explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace polylab
