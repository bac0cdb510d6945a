#pragma once

#include <stdexcept>
#include <string>

namespace dichotomy {

/// Base for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Document structure does not match the spec file schema. `where` is a
/// JSON-pointer-like field path, e.g. "transitions.prefix[0][1]".
class SchemaError : public Error {
 public:
  SchemaError(std::string where, const std::string& what)
      : Error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

/// Well-formed document with invalid numbers (negative entry, bad row sum).
class NumericError : public SchemaError {
 public:
  using SchemaError::SchemaError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Two measures cannot be compared (alphabet, sidedness, or dimension).
class IncompatibleError : public Error {
 public:
  using Error::Error;
};

class NullEventError : public Error {
 public:
  NullEventError() : Error("conditioning on null event") {}
};

class NotLocAcError : public Error {
 public:
  using Error::Error;
};

/// Brute-force enumeration refused because the path space is too large.
class GuardError : public Error {
 public:
  using Error::Error;
};

}  // namespace dichotomy
