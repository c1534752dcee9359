#ifndef BNREFINE_ERROR_HPP
#define BNREFINE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace bnrefine {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent schema, arc priors or search parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Shapes that do not line up (count tables vs parent sets, data vs params).
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Illegal lifecycle transition, e.g. reviving a dead lattice node.
class StateError : public Error {
 public:
  using Error::Error;
};

/// Malformed input document. `where()` names the offending location.
class ParseError : public Error {
 public:
  ParseError(std::string where, const std::string& what)
      : Error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

/// An oracle refused an input above its size guard.
class GuardError : public Error {
 public:
  using Error::Error;
};

}  // namespace bnrefine

#endif  // BNREFINE_ERROR_HPP
