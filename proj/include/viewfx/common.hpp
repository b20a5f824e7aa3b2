#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace viewfx {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Thrown when an operation receives arguments that violate its contract.
class InvalidInputError : public std::invalid_argument {
 public:
  explicit InvalidInputError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Thrown when a file cannot be parsed; carries the offending line when known.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Thrown when loaded data violates dataset invariants (e.g. a capture group
/// with inconsistent labels).
class IntegrityError : public std::runtime_error {
 public:
  explicit IntegrityError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Thrown when a checkpoint has the wrong version or does not match the
/// model configuration it is being loaded into.
class CheckpointError : public std::runtime_error {
 public:
  explicit CheckpointError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Thrown when a run configuration fails schema validation. The message
/// carries the JSON field path.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Thrown when training encounters a non-finite loss; carries the sample ids
/// of the offending batch for diagnosis.
class NonFiniteLossError : public std::runtime_error {
 public:
  explicit NonFiniteLossError(const std::string& msg) : std::runtime_error(msg) {}
};

inline void check_input(bool cond, const std::string& msg) {
  if (!cond) throw InvalidInputError(msg);
}

}  // namespace viewfx
