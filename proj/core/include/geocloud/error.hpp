#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace geocloud {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Frequency lies inside the ladder bounds but not on a ladder step.
class OffLadderFrequency : public Error {
 public:
  using Error::Error;
};

/// Frequency lies outside [f_min, f_max].
class OutOfRange : public Error {
 public:
  using Error::Error;
};

/// Step index or core count outside the calibrated power surface grid.
class OutOfGrid : public Error {
 public:
  using Error::Error;
};

class BetaOutOfRange : public Error {
 public:
  using Error::Error;
};

/// Least-squares design matrix does not have full column rank.
class RankDeficient : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class FrequencyOutOfRange : public Error {
 public:
  using Error::Error;
};

/// A value violates a documented type invariant.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. `row()` is 1-based and counts the header line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row)
      : Error(what + " (row " + std::to_string(row) + ")"), row_(row) {}

  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

/// Invalid or inconsistent configuration, detected before any run starts.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace geocloud
