#pragma once

#include <stdexcept>
#include <string>

namespace memcirc {

/// Invalid input: bad shapes, out-of-range parameters, malformed graphs.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// A linear solve or factorization failed, or a positivity check was violated.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularSystem : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// I + xi (Omega W + W Omega)/2 is not positive definite at the requested xi.
class PositivityViolation : public NumericalError {
 public:
  PositivityViolation(const std::string& what, double max_admissible_xi)
      : NumericalError(what), max_admissible_xi_(max_admissible_xi) {}
  double max_admissible_xi() const noexcept { return max_admissible_xi_; }

 private:
  double max_admissible_xi_;
};

/// Parse or file errors; line is 1-based, 0 when not applicable.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Experiment configuration problems; field is a dotted path such as "params.xi".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace memcirc
