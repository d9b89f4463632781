#pragma once

#include <stdexcept>
#include <string>

namespace floqflow {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller broke an interface contract (e.g. mismatched dimensions).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// Input outside the domain an operation is defined on (e.g. non-Hermitian
// matrix passed to eigh).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class UnsupportedConfiguration : public Error {
 public:
  using Error::Error;
};

class UndefinedDiagnostic : public Error {
 public:
  using Error::Error;
};

class IntegrationFailure : public Error {
 public:
  IntegrationFailure(const std::string& what, double last_good_lambda)
      : Error(what), last_good_lambda_(last_good_lambda) {}
  double last_good_lambda() const noexcept { return last_good_lambda_; }

 private:
  double last_good_lambda_;
};

class NoMinimumError : public Error {
 public:
  enum class Reason { monotone, floating_point_floor };
  NoMinimumError(const std::string& what, Reason reason, double last_valid_lambda)
      : Error(what), reason_(reason), last_valid_lambda_(last_valid_lambda) {}
  Reason reason() const noexcept { return reason_; }
  double last_valid_lambda() const noexcept { return last_valid_lambda_; }

 private:
  Reason reason_;
  double last_valid_lambda_;
};

class FitError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace floqflow
