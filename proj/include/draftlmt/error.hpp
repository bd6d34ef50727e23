#pragma once

#include <stdexcept>
#include <string>

namespace draftlmt {

// Root of the library's exception hierarchy. The CLI maps each subclass to a
// distinct exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A required column is missing or the header is malformed.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// A value could not be parsed. Carries the 1-based line number of the CSV
// record (0 when not tied to a line).
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Data that parses but violates a preprocessing or modelling precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A model and a dataset disagree on their feature schema.
class SchemaMismatchError : public Error {
 public:
  using Error::Error;
};

}  // namespace draftlmt
