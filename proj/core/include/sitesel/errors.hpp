#pragma once

#include <stdexcept>
#include <string>

namespace sitesel {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class PreconditionViolation : public Error {
 public:
  using Error::Error;
};

/// Retained fraction fell below the renormalization floor.
class DegenerateSelection : public Error {
 public:
  using Error::Error;
};

class EmptyEnsemble : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  using Error::Error;
};

class InversionError : public Error {
 public:
  using Error::Error;
};

/// Iterative solver failed to converge.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace sitesel
