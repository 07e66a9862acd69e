#pragma once

#include <stdexcept>
#include <string>

namespace aperiodic {

// Every failure the library reports derives from Error so callers can catch
// the family at once; the concrete type names the failed contract.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

class DegenerateFit : public Error {
 public:
  using Error::Error;
};

class TooFewResolved : public Error {
 public:
  using Error::Error;
};

class PreconditionFailed : public Error {
 public:
  using Error::Error;
};

class MalformedEvent : public Error {
 public:
  using Error::Error;
};

class NotHyperbolic : public Error {
 public:
  using Error::Error;
};

// The shadowing hypothesis of a closing check does not hold for the given
// input: a non-instance, not a failure of the statement being checked.
class HypothesisFailed : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// Raised when a comparison needs symbols beyond a finite (cylinder) word.
class UnresolvedComparison : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace aperiodic
