#pragma once

#include <stdexcept>
#include <string>

namespace lrdemp {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter lies outside its mathematical domain (beta, n, sigma, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Inputs that were produced from incompatible configurations.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class BudgetExceededError : public Error {
 public:
  using Error::Error;
};

class DegenerateModelError : public Error {
 public:
  using Error::Error;
};

/// (p+1)(2 beta - 1) == 1, or beta == 3/4 where the regime dichotomy is undefined.
class UnsupportedBoundaryError : public Error {
 public:
  using Error::Error;
};

class RegimeError : public Error {
 public:
  using Error::Error;
};

class NoRootError : public Error {
 public:
  using Error::Error;
};

class NumericDomainError : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

/// A caller-supplied evaluator violated its contract (e.g. a non-monotone cdf).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// A file could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Invalid experiment configuration; `pointer()` is the JSON pointer of the field.
class ConfigError : public Error {
 public:
  ConfigError(std::string pointer, const std::string& what)
      : Error(pointer + ": " + what), pointer_(std::move(pointer)) {}
  const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

}  // namespace lrdemp
