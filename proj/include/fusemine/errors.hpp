#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace fusemine {

// Base of every error thrown by the library. The CLI maps InputError
// subclasses to exit code 2 and everything else to exit code 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Problems with user-supplied files, schemas or values.
class InputError : public Error {
 public:
  using Error::Error;
};

class IoError : public InputError {
 public:
  using InputError::InputError;
};

class SchemaMismatch : public InputError {
 public:
  using InputError::InputError;
};

// Row and column are zero-based; row 0 is the first line after the header.
class ParseError : public InputError {
 public:
  ParseError(std::size_t row, std::size_t column, const std::string& what);
  std::size_t row() const { return row_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

class DuplicateId : public InputError {
 public:
  explicit DuplicateId(long long id);
  long long id() const { return id_; }

 private:
  long long id_;
};

class IdMismatch : public InputError {
 public:
  explicit IdMismatch(std::vector<long long> ids);
  const std::vector<long long>& ids() const { return ids_; }

 private:
  std::vector<long long> ids_;
};

class UnknownAttribute : public InputError {
 public:
  using InputError::InputError;
};

class OutOfRangeScore : public InputError {
 public:
  using InputError::InputError;
};

class SyntaxError : public InputError {
 public:
  SyntaxError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class InvalidParams : public InputError {
 public:
  using InputError::InputError;
};

class EmptyColumn : public Error {
 public:
  using Error::Error;
};

class MixedKindGroup : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class EmptySubset : public Error {
 public:
  using Error::Error;
};

class TooFewRows : public Error {
 public:
  using Error::Error;
};

class SingleClassTruth : public Error {
 public:
  using Error::Error;
};

class InfeasibleRuleset : public Error {
 public:
  using Error::Error;
};

}  // namespace fusemine
