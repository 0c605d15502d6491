#pragma once

#include <stdexcept>
#include <string>

namespace beamgp {

/// Programmer contract breach (bad derivative order, empty chain, ...).
struct ContractViolation : std::invalid_argument {
  explicit ContractViolation(const std::string& what) : std::invalid_argument(what) {}
};

/// A value is outside its physical domain (location off the beam, sigma <= 0, ...).
struct DomainError : std::domain_error {
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Malformed input file. Carries a line number when one is known.
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what, long line = -1)
      : std::runtime_error(line >= 0 ? what + " (line " + std::to_string(line) + ")" : what),
        line_number(line) {}
  long line_number;
};

/// Semantically invalid configuration (missing fiber distance, mismatched labels, ...).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Sampler start point has zero posterior density.
struct InvalidStartError : ConfigError {
  explicit InvalidStartError(const std::string& what) : ConfigError(what) {}
};

/// Numerical failure: singular covariance, degenerate posterior, ...
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace beamgp
