#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace finslerlab {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite or out-of-domain value met while evaluating a function.
class EvaluationDomainError : public Error {
 public:
  using Error::Error;
};

class DegenerateSeedsError : public Error {
 public:
  using Error::Error;
};

// The integrated state left the caller's domain predicate.
class DomainExitError : public Error {
 public:
  DomainExitError(const std::string& what, double last_parameter, std::vector<double> last_state)
      : Error(what), last_parameter_(last_parameter), last_state_(std::move(last_state)) {}

  double last_parameter() const noexcept { return last_parameter_; }
  const std::vector<double>& last_state() const noexcept { return last_state_; }

 private:
  double last_parameter_;
  std::vector<double> last_state_;
};

// Step size underflow in the adaptive integrator.
class StiffnessError : public Error {
 public:
  using Error::Error;
};

class NoSignChangeError : public Error {
 public:
  using Error::Error;
};

class IterationLimitError : public Error {
 public:
  using Error::Error;
};

// Invalid metric or run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Fundamental tensor is not positive-definite, or a Randers one-form is too long.
class ConvexityViolation : public Error {
 public:
  using Error::Error;
};

class DegenerateFlagError : public Error {
 public:
  using Error::Error;
};

class CriticalPointError : public Error {
 public:
  using Error::Error;
};

// The projective parameter pi = u1/u2 hit a pole (u2 crossed zero).
class PoleError : public Error {
 public:
  PoleError(const std::string& what, double arc_length) : Error(what), arc_length_(arc_length) {}
  double arc_length() const noexcept { return arc_length_; }

 private:
  double arc_length_;
};

// Two-point boundary value search did not find a connecting geodesic.
class SearchFailure : public Error {
 public:
  SearchFailure(const std::string& what, double residual) : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class MalformedChainError : public Error {
 public:
  using Error::Error;
};

class DegenerateFitError : public Error {
 public:
  using Error::Error;
};

}  // namespace finslerlab
