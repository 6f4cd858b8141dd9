#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cam {

enum class ErrorKind {
  kConfiguration,
  kDomain,
  kSingularity,
  kPropagation,
  kCovariance,
  kGeometry,
  kFrame,
  kNumeric,
  kDegenerateGradient,
  kNonConvergence,
  kInfeasible,
  kGeneration,
  kParse,
  kValidation,
};

std::string_view to_string(ErrorKind kind);

/// Base class for every error raised by the library. The kind drives the CLI
/// exit code and the `class` field of the error JSON.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class DomainError : public Error {
 public:
  DomainError(const std::string& what, double value)
      : Error(ErrorKind::kDomain, what), value_(value) {}
  double value() const noexcept { return value_; }

 private:
  double value_;
};

class PropagationError : public Error {
 public:
  PropagationError(ErrorKind kind, const std::string& what, double time)
      : Error(kind, what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, std::vector<double> last_iterate)
      : Error(ErrorKind::kNonConvergence, what), last_iterate_(std::move(last_iterate)) {}
  const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }

 private:
  std::vector<double> last_iterate_;
};

class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, double residual_poc)
      : Error(ErrorKind::kInfeasible, what), residual_poc_(residual_poc) {}
  double residual_poc() const noexcept { return residual_poc_; }

 private:
  double residual_poc_;
};

}  // namespace cam
