#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace equix {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed XML, DTD or regular expression text.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& message, std::size_t line, std::size_t column)
      : Error(message + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class DtdError : public Error {
 public:
  using Error::Error;
};

class DocumentError : public Error {
 public:
  using Error::Error;
};

// Query JSON that does not follow the schema. `pointer` locates the
// offending value as a JSON pointer.
class QuerySchemaError : public Error {
 public:
  QuerySchemaError(const std::string& message, std::string pointer)
      : Error(message + " at '" + pointer + "'"), pointer_(std::move(pointer)) {}

  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

class PatternError : public Error {
 public:
  using Error::Error;
};

// A well-formed query that cannot be evaluated against the chosen DTD or
// ontology.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> diagnostics)
      : Error(diagnostics.empty() ? "query validation failed" : diagnostics.front()),
        diagnostics_(std::move(diagnostics)) {}

  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<std::string> diagnostics_;
};

class BoundExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace equix
