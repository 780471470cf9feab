#pragma once

#include <stdexcept>
#include <string>

namespace dbtsw {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user configuration (sampler, estimator, CLI grid...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Bad input data. Subclasses name the specific defect.
class DataError : public Error {
 public:
  using Error::Error;
};

class InvalidMeasure : public DataError {
 public:
  using DataError::DataError;
};

class DimensionError : public DataError {
 public:
  using DataError::DataError;
};

class MassError : public DataError {
 public:
  using DataError::DataError;
};

class SizeError : public DataError {
 public:
  using DataError::DataError;
};

class ScaleError : public DataError {
 public:
  using DataError::DataError;
};

class IndexError : public DataError {
 public:
  using DataError::DataError;
};

// Operation requires a different tree structure (e.g. Concurrent only).
class StructureError : public DataError {
 public:
  using DataError::DataError;
};

// Gram-Schmidt hit a near-zero residual; callers redraw the directions.
class DegenerateDirections : public Error {
 public:
  using Error::Error;
};

// Gradient flow blew up (exact W2 grew past the guard).
class DivergenceError : public Error {
 public:
  using Error::Error;
};

class IoError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace dbtsw
