#pragma once

#include <stdexcept>
#include <string>

namespace graphdep {

/// Base class for all library errors.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Distribution parameters outside their admissible range.
class parameter_error : public error {
 public:
  using error::error;
};

/// A point lies off the declared support of a distribution pair.
class support_error : public error {
 public:
  using error::error;
};

/// A numeric routine failed to converge; carries the residual it reached.
class numeric_error : public error {
 public:
  numeric_error(const std::string& what, double residual)
      : error(what + " (residual=" + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_ = 0.0;
};

/// An exhaustive enumeration would exceed its configured size cap.
class capacity_error : public error {
 public:
  using error::error;
};

/// A moment required by the operation does not exist (e.g. Cauchy variance).
class unsupported_moment_error : public error {
 public:
  using error::error;
};

/// Requested exponent level lies above the reachable range of the curve.
class unreachable_level_error : public error {
 public:
  using error::error;
};

/// Log-MGF is infinite everywhere except the origin.
class degenerate_profile_error : public error {
 public:
  using error::error;
};

/// Diagnostic: the pair fails the polynomial projection structure.
class not_in_d3_error : public error {
 public:
  using error::error;
};

}  // namespace graphdep
