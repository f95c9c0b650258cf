#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cococat {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A parameter outside its mathematical domain (negative rate, sigma <= 0, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// A numerical routine could not reach its requested accuracy.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double achieved_error)
      : Error(what), achieved_error_(achieved_error) {}

  double achieved_error() const noexcept { return achieved_error_; }

 private:
  double achieved_error_;
};

// Inputs that are individually valid but jointly unusable, e.g. a singular
// tilted rate parameter set or an inconsistent covenant.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class CoverageError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace cococat
