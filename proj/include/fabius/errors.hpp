#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace fabius {

/// Argument outside the region where an operation is defined.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class DivisionByZero : public std::domain_error {
 public:
  DivisionByZero() : std::domain_error("division by zero") {}
};

/// Malformed textual input. `token()` is the offending piece of text.
class ParseError : public std::invalid_argument {
 public:
  ParseError(std::string token, const std::string& what)
      : std::invalid_argument(what), token_(std::move(token)) {}

  const std::string& token() const noexcept { return token_; }

 private:
  std::string token_;
};

/// A serialized identity table failed an integrity check on load.
class CorruptTable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fabius
