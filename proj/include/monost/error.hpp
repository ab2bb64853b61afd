#pragma once

#include <stdexcept>
#include <string>

namespace monost {

// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller supplied an argument outside an operation's domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A file could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

// A file was readable but its contents do not follow the expected format.
class FormatError : public Error {
 public:
  using Error::Error;
};

// A numerical routine could not produce a usable result.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace monost
