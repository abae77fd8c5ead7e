#pragma once

#include <stdexcept>
#include <string>

namespace supportfit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes or lengths of inputs do not agree (dimension mismatch, ragged lists).
class MalformedInput : public Error {
 public:
  using Error::Error;
};

/// A scalar parameter lies outside its admissible range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A body or data set violates a modelling assumption (e.g. the radius bound).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Problem exceeds the configured size cap of a solver.
class SizeError : public Error {
 public:
  using Error::Error;
};

}  // namespace supportfit
