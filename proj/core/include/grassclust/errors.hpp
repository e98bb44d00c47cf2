#pragma once

#include <stdexcept>
#include <string>

namespace grassclust {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: dimension mismatches, empty inputs, bad indices.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Invalid parameter or kernel configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Data that is well-formed but numerically unusable (rank deficiency, empty graph).
class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

/// A requested sample index lies outside the available series.
class OutOfRangeError : public InputError {
 public:
  OutOfRangeError(const std::string& what, long missing_index);
  long missing_index() const noexcept { return missing_index_; }

 private:
  long missing_index_;
};

/// Logarithm map requested across the cut locus (a principal angle at pi/2).
class CutLocusError : public Error {
 public:
  CutLocusError(const std::string& what, double max_angle);
  double max_angle() const noexcept { return max_angle_; }

 private:
  double max_angle_;
};

}  // namespace grassclust
