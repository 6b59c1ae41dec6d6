#pragma once

#include <stdexcept>
#include <string>

namespace morphoflow {

/// Invalid input parameter (non-positive width, malformed mesh request, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A deformation whose Jacobian is not strictly positive somewhere.
class DegenerateDeformationError : public std::runtime_error {
 public:
  DegenerateDeformationError(const std::string& what, std::size_t node, double jac)
      : std::runtime_error(what), node_(node), jac_(jac) {}
  std::size_t node() const noexcept { return node_; }
  double jacobian() const noexcept { return jac_; }

 private:
  std::size_t node_;
  double jac_;
};

/// Linear solver breakdown or an indefinite system where a definite one was expected.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration file problems; carries the offending line (0 when not line-specific).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace morphoflow
