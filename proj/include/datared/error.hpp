#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace datared {

// Caller passed something unusable: bad ratio, bad shape request, unknown
// enum name. Maps to CLI exit code 2.
class ArgumentError : public std::invalid_argument {
 public:
  explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

// Input data violates the declared schema (missing column, wrong arity).
class SchemaError : public std::runtime_error {
 public:
  explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

// A cell could not be parsed. Message carries the 1-based row and column.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Matrix/vector dimensions disagree with what the operation needs.
class ShapeError : public std::runtime_error {
 public:
  explicit ShapeError(const std::string& what) : std::runtime_error(what) {}
};

// A class present in the reference set has no representative in the reduced
// set, so per-class statistics are undefined.
class CoverageError : public std::runtime_error {
 public:
  explicit CoverageError(const std::string& what) : std::runtime_error(what) {}
};

// Training produced a non-finite loss.
class DivergenceError : public std::runtime_error {
 public:
  explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

// Configuration file rejected. Carries every problem found, not just the
// first, so one edit pass can fix the file.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::vector<std::string> issues)
      : std::runtime_error(what), issues_(std::move(issues)) {}

  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

}  // namespace datared
