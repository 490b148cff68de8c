#pragma once

#include <stdexcept>
#include <string>

namespace foa {

// Base of every error raised by the library. Callers that only need to
// distinguish "bad input" from "bug" can catch this one.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed configuration, script or data file.
class ParseError : public Error {
 public:
  using Error::Error;
};

// A value that parsed but violates a documented invariant. field() names it.
class InvariantError : public Error {
 public:
  InvariantError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// Pearson correlation with a zero-variance operand.
class UndefinedCorrelation : public Error {
 public:
  using Error::Error;
};

// Histogram without two separated maxima; blob cannot be split into head
// and shoulders.
class NoHeadSplit : public Error {
 public:
  using Error::Error;
};

class DegenerateFit : public Error {
 public:
  using Error::Error;
};

// Evaluation of an attention factor outside its domain (r <= 0, v < 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

class TrackTooShort : public Error {
 public:
  using Error::Error;
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

// Missing or corrupt input file. path() names the offending file.
class DataError : public Error {
 public:
  DataError(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace foa
