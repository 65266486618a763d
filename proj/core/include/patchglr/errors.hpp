#pragma once

#include <stdexcept>
#include <string>

namespace patchglr {

/// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Domain or dimension violation on an input (never silently clamped).
class InvalidInputError : public Error {
public:
  using Error::Error;
};

/// A template whose contrast parameters are unidentifiable
/// (constant atom, or constant in the log domain for log-affine fits).
class DegenerateAtomError : public InvalidInputError {
public:
  using InvalidInputError::InvalidInputError;
};

/// File / stream failure.
class IoError : public Error {
public:
  using Error::Error;
};

} // namespace patchglr
