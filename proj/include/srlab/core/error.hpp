#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace srlab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Inputs that do not fit together (grid mismatch, length mismatch).
class StructuralError : public Error {
public:
  using Error::Error;
};

/// A domain invariant of an input is violated (non-positive density, ...).
class InvariantViolation : public Error {
public:
  using Error::Error;
};

/// The requested computation is not supported for this configuration.
class UnsupportedConfiguration : public Error {
public:
  using Error::Error;
};

/// The frame degenerates: a pointwise linear solve is singular.
/// Carries every offending grid location.
class DegeneracyError : public Error {
public:
  struct Location {
    std::size_t index;
    std::array<double, 3> point;
  };

  DegeneracyError(const std::string& what, std::vector<Location> locations)
      : Error(what), locations_(std::move(locations)) {}

  const std::vector<Location>& locations() const noexcept { return locations_; }

private:
  std::vector<Location> locations_;
};

/// A memory or work budget would be exceeded.
class CapacityError : public Error {
public:
  using Error::Error;
};

/// A query falls outside the range where a result is known to be complete.
class IncompletenessError : public Error {
public:
  using Error::Error;
};

/// Dirichlet truncation window too small for the requested tolerance.
class WindowError : public Error {
public:
  WindowError(const std::string& what, double suggested_half_width)
      : Error(what), suggested_half_width_(suggested_half_width) {}
  double suggested_half_width() const noexcept { return suggested_half_width_; }

private:
  double suggested_half_width_;
};

/// A least-squares fit could not be formed.
class FitError : public Error {
public:
  using Error::Error;
};

/// An operation was applied to an object outside its domain
/// (e.g. factorization of an elliptic-sector eigenpair).
class NotApplicable : public Error {
public:
  using Error::Error;
};

/// A trajectory left a non-periodic chart.
class EscapeError : public Error {
public:
  EscapeError(const std::string& what, double exit_time)
      : Error(what), exit_time_(exit_time) {}
  double exit_time() const noexcept { return exit_time_; }

private:
  double exit_time_;
};

/// Configuration or expression parse failure, 1-based line/column.
class ConfigError : public Error {
public:
  ConfigError(const std::string& what, int line = 0, int column = 0)
      : Error(format(what, line, column)), line_(line), column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

private:
  static std::string format(const std::string& what, int line, int column) {
    if (line <= 0 && column <= 0) return what;
    if (line <= 0) return "column " + std::to_string(column) + ": " + what;
    return "line " + std::to_string(line) + ", column " + std::to_string(column) +
           ": " + what;
  }
  int line_;
  int column_;
};

}  // namespace srlab
