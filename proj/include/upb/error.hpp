#pragma once

#include <stdexcept>
#include <string>

namespace upb {

/// Base class for all errors raised by the library. `module()` names the
/// subsystem that raised it so the CLI can report provenance.
class Error : public std::runtime_error {
public:
  Error(std::string module, const std::string& what)
      : std::runtime_error(what), module_(std::move(module)) {}

  const std::string& module() const noexcept { return module_; }

private:
  std::string module_;
};

/// Invalid input: violated preconditions on a spec, config or argument.
class ValidationError : public Error {
public:
  using Error::Error;
};

/// A resolvent was evaluated too close to one of its poles.
class PoleError : public Error {
public:
  PoleError(std::string module, const std::string& what, double pole)
      : Error(std::move(module), what), pole_(pole) {}

  /// Offending eigenvalue (or eigenvalue sum) that caused the resonance.
  double pole() const noexcept { return pole_; }

private:
  double pole_;
};

class SingularMatrixError : public Error {
public:
  using Error::Error;
};

/// g2 requested where the one-photon amplitude or occupation vanishes.
class UndefinedCorrelationError : public Error {
public:
  using Error::Error;
};

class BudgetError : public Error {
public:
  BudgetError(std::string module, const std::string& what, double required)
      : Error(std::move(module), what), required_(required) {}

  double required() const noexcept { return required_; }

private:
  double required_;
};

class IntegratorError : public Error {
public:
  IntegratorError(std::string module, const std::string& what, std::size_t trajectory, double time)
      : Error(std::move(module), what), trajectory_(trajectory), time_(time) {}

  std::size_t trajectory() const noexcept { return trajectory_; }
  double time() const noexcept { return time_; }

private:
  std::size_t trajectory_;
  double time_;
};

/// An exact identity that must hold did not. Indicates a bug.
class ConsistencyError : public Error {
public:
  using Error::Error;
};

class NoBracketedMinimumError : public Error {
public:
  using Error::Error;
};

class GridTooCoarseError : public Error {
public:
  using Error::Error;
};

}  // namespace upb
