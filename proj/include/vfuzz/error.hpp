#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vfuzz {

// Base for every error the library raises. `where` is a human-readable
// position (line:col, byte offset, or JSON pointer); empty when unknown.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what, std::string where = {})
      : std::runtime_error(where.empty() ? what : where + ": " + what),
        where_(std::move(where)) {}

  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

// Malformed text or document.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Well-formed document whose contents break a schema rule.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Dimensions of data and model disagree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Caller passed something outside the documented domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace vfuzz
