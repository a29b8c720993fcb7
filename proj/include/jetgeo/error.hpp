#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace jetgeo {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MissingSymbol : public Error {
 public:
  explicit MissingSymbol(const std::string& name)
      : Error("missing value for symbol '" + name + "'"), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

/// Division by zero, sqrt of a negative number or a non-finite result.
class DomainError : public Error {
 public:
  using Error::Error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& message, std::size_t position)
      : Error(message + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class UnknownSymbol : public Error {
 public:
  UnknownSymbol(const std::string& name, std::size_t position)
      : Error("unknown symbol '" + name + "' at position " + std::to_string(position)),
        name_(name),
        position_(position) {}
  const std::string& name() const noexcept { return name_; }
  std::size_t position() const noexcept { return position_; }

 private:
  std::string name_;
  std::size_t position_;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class FrameMismatch : public Error {
 public:
  using Error::Error;
};

class BadSplit : public Error {
 public:
  using Error::Error;
};

class InconsistentPerturbation : public Error {
 public:
  using Error::Error;
};

class SingularJacobian : public Error {
 public:
  using Error::Error;
};

/// Malformed input file (JSON spec or jet file).
class LoadError : public Error {
 public:
  using Error::Error;
};

}  // namespace jetgeo
