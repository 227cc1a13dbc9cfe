#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace skewbs {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter or data value lies outside its domain (alpha <= 0, log of a non-positive value, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The design matrix is not of full column rank.
class RankError : public Error {
 public:
  using Error::Error;
};

/// A matrix that must be factorized (observed information, a sub-block of it) is numerically singular.
class SingularityError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class EigenFailure : public Error {
 public:
  using Error::Error;
};

/// Covariate perturbation requested on a constant (intercept-like) column.
class ConstantColumnError : public Error {
 public:
  using Error::Error;
};

/// Restricted and full fits that cannot be nested (restricted loglik above the full one).
class InvalidPair : public Error {
 public:
  using Error::Error;
};

/// Malformed delimited input. `line()` is 1-based and counts the header.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace skewbs
