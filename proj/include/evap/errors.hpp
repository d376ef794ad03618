#pragma once

#include <stdexcept>
#include <string>

namespace evap {

/// Invalid physical or numerical configuration (bad parameter, unsupported order).
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Vector or matrix dimensions that do not match the operator they are used with.
class ShapeError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Interface ordering violated or a Jacobian/quadrature weight is non-positive.
class GeometryError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A phase has been squeezed below the minimum admissible width.
class PhaseDepletion : public GeometryError {
public:
  using GeometryError::GeometryError;
};

/// Non-finite value produced while assembling the right-hand side.
class NumericalFailure : public std::runtime_error {
public:
  NumericalFailure(std::string term, long node, const std::string& what)
      : std::runtime_error(what), term_(std::move(term)), node_(node) {}

  const std::string& term() const { return term_; }
  long node() const { return node_; }

private:
  std::string term_;
  long node_;
};

}  // namespace evap
