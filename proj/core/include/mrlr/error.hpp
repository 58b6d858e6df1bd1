#pragma once

#include <stdexcept>
#include <string>

namespace mrlr {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Array dimensions do not agree with what an operation requires.
class ShapeError : public Error {
public:
  using Error::Error;
};

/// A patch layout does not tile the array it is applied to.
class LayoutError : public Error {
public:
  using Error::Error;
};

/// An argument is outside its admissible range.
class ParameterError : public Error {
public:
  using Error::Error;
};

/// Non-finite values reached a numerical routine.
class NumericError : public Error {
public:
  using Error::Error;
};

/// The solver objective blew up relative to its starting value.
class DivergenceError : public Error {
public:
  using Error::Error;
};

/// Reading or writing a file failed.
class IoError : public Error {
public:
  using Error::Error;
};

} // namespace mrlr
