#pragma once

#include <stdexcept>
#include <string>

namespace leafscan {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// File could not be read or decoded. The message names the path.
class DecodeError : public Error {
public:
  using Error::Error;
};

class UnsupportedFormatError : public DecodeError {
public:
  using DecodeError::DecodeError;
};

/// Filesystem read/write failure.
class IoError : public Error {
public:
  using Error::Error;
};

class EncodeError : public Error {
public:
  using Error::Error;
};

/// Inputs disagree on width/height.
class DimensionMismatch : public Error {
public:
  using Error::Error;
};

/// A scalar argument is outside its documented range.
class OutOfRange : public Error {
public:
  using Error::Error;
};

/// Histogram has a single populated bin: no threshold separates two classes.
class UniformImageError : public Error {
public:
  UniformImageError() : Error("uniform image, no threshold exists") {}
};

/// Overlapping pixel sets handed to quantify; always an upstream bug.
class OverlapError : public Error {
public:
  using Error::Error;
};

class UndefinedCorrelation : public Error {
public:
  using Error::Error;
};

/// Synthetic leaf description violates its invariants.
class SpecError : public Error {
public:
  using Error::Error;
};

/// Structured document could not be parsed or has the wrong shape.
class DocumentError : public Error {
public:
  using Error::Error;
};

} // namespace leafscan
