#pragma once

#include <stdexcept>
#include <string>

namespace tanklab {

/// Operating point violates the square-root domain of the linearization.
class DegenerateOperatingPoint : public std::invalid_argument {
 public:
  explicit DegenerateOperatingPoint(const std::string& what)
      : std::invalid_argument(what) {}
};

/// A state component became NaN or infinite during integration
/// (usually a too-large dt).
class NonFiniteState : public std::runtime_error {
 public:
  explicit NonFiniteState(const std::string& what) : std::runtime_error(what) {}
};

/// A scenario asked for a controller whose configuration was not supplied.
class ConfigMissing : public std::runtime_error {
 public:
  explicit ConfigMissing(const std::string& what) : std::runtime_error(what) {}
};

/// Config file failed to parse or validate; `key()` names the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// The proportional loop is stable over the whole searched gain range.
class NoUltimateGain : public std::runtime_error {
 public:
  explicit NoUltimateGain(const std::string& what) : std::runtime_error(what) {}
};

/// No fuzzy rule fired, so the aggregated output set is empty.
class EmptyAggregate : public std::runtime_error {
 public:
  explicit EmptyAggregate(const std::string& what) : std::runtime_error(what) {}
};

/// The trace does not contain the requested setpoint step.
class NoStepFound : public std::runtime_error {
 public:
  explicit NoStepFound(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tanklab
