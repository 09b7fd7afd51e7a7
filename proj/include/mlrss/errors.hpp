#pragma once

#include <stdexcept>
#include <string>

namespace mlrss {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (files, series, ranges).
struct DataError : Error {
  using Error::Error;
};

struct OutOfOrderDay : DataError {
  using DataError::DataError;
};

struct RangeMismatch : DataError {
  using DataError::DataError;
};

struct IndexOutOfRange : DataError {
  using DataError::DataError;
};

/// A numerical procedure could not produce a usable result.
struct NumericalError : Error {
  using Error::Error;
};

struct SingularDesign : NumericalError {
  using NumericalError::NumericalError;
};

// All-zero (or otherwise boundary) response; the Poisson MLE does not exist.
struct DegenerateResponse : NumericalError {
  using NumericalError::NumericalError;
};

struct OverflowError : NumericalError {
  using NumericalError::NumericalError;
};

struct FitFailed : NumericalError {
  using NumericalError::NumericalError;
};

struct EmptyBank : NumericalError {
  using NumericalError::NumericalError;
};

struct NonpositiveLambda : NumericalError {
  using NumericalError::NumericalError;
};

}  // namespace mlrss
