#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tauber {

/// Root of the library's exception hierarchy. Each subclass maps onto one CLI exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t position)
      : Error(msg + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Enumeration beyond the desk-scale cap.
class ScaleCapError : public Error {
 public:
  using Error::Error;
};

/// Caller violated an operation's stated precondition (e.g. matrix not regular).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A bounded search (index, witness, phase) ran out of budget.
class SearchCapError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class IllegalMoveError : public Error {
 public:
  using Error::Error;
};

class VerificationError : public Error {
 public:
  using Error::Error;
};

}  // namespace tauber
