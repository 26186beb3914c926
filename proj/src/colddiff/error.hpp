// Copyright 2026 The colddiff Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <stdexcept>
#include <string>

namespace colddiff {

// Numeric values double as CLI exit codes and C API status codes.
enum class ErrorKind : int {
  kUsage = 1,      // bad arguments, config or preconditions
  kData = 2,       // missing/unreadable/inconsistent files or signals
  kNumerical = 3,  // non-finite values or degenerate numerics
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::kUsage, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::kData, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ErrorKind::kNumerical, what) {}
};

// Throws UsageError with `message` when `condition` is false.
void require(bool condition, const std::string& message);

}  // namespace colddiff
