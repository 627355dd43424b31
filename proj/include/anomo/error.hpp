#pragma once

#include <stdexcept>
#include <string>

namespace anomo {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes or indices that do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Out-of-range configuration value.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A small dense system could not be factorized.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// An iterate became NaN or infinite.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Slices handed to a tracker out of order.
class SequencingError : public Error {
 public:
  using Error::Error;
};

/// Geometric input that admits no triangulation (collinear or duplicate points).
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

class PathError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file; message carries line and column.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent data, e.g. overlapping anomaly events or a truth set without positives.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Invalid experiment configuration (unknown key, wrong type, bad version).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace anomo
