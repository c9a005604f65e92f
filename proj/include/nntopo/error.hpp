#pragma once

#include <stdexcept>
#include <string>

namespace nntopo {

enum class ErrorKind {
  validation,  // bad input data or arguments
  io,          // unreadable / unwritable files
  invariant,   // an internal consistency check failed
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(ErrorKind::validation, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

class InvariantError : public Error {
 public:
  explicit InvariantError(const std::string& what)
      : Error(ErrorKind::invariant, what) {}
};

}  // namespace nntopo
