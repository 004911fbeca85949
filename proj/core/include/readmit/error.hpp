#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace readmit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. `row` is the zero-based data row index (header excluded),
// or npos when the problem is not tied to a row.
class ParseError : public Error {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  ParseError(const std::string& what, std::size_t row = npos) : Error(what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

// A required column (or section) is absent.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// A value outside the documented domain of an encoder, parameter or operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace readmit
