#pragma once

#include <stdexcept>
#include <string>

namespace svarmsh {

// Raised when a requested moment does not exist under the parameter
// inequality required by the closed-form expression.  Carries the violated
// inequality as structured data so callers can report it without parsing
// the message.
class MomentExistenceError : public std::domain_error {
public:
  MomentExistenceError(std::string parameter, double value, double bound,
                       int moment_order)
      : std::domain_error("moment of order " + std::to_string(moment_order) +
                          " does not exist: requires " + parameter + " > " +
                          std::to_string(bound) + ", got " +
                          std::to_string(value)),
        parameter_(std::move(parameter)), value_(value), bound_(bound),
        moment_order_(moment_order) {}

  const std::string& parameter() const { return parameter_; }
  double value() const { return value_; }
  double bound() const { return bound_; }
  int moment_order() const { return moment_order_; }

private:
  std::string parameter_;
  double value_;
  double bound_;
  int moment_order_;
};

// Ingestion / configuration problems that should surface to the CLI user
// with an actionable message (bad cell, short sample, unknown key, ...).
class InputError : public std::runtime_error {
public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failures in model routines (unstable companion matrix,
// reducible transition matrix, non-positive-definite covariance, ...).
class ModelError : public std::runtime_error {
public:
  explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace svarmsh
