#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace artemis {

// Base of every error the library throws. Callers that only care about
// "something went wrong" catch this; the CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (files, records, scenarios).
class DataError : public Error {
 public:
  using Error::Error;
};

class ZeroVarianceError : public DataError {
 public:
  explicit ZeroVarianceError(std::string feature)
      : DataError("zero variance in feature '" + feature + "'"), feature_(std::move(feature)) {}
  const std::string& feature() const noexcept { return feature_; }

 private:
  std::string feature_;
};

// Vitals outside the physiological outlier bounds; in the field this means a
// sensor fault.
class OutOfRangeError : public DataError {
 public:
  using DataError::DataError;
};

class InsufficientDataError : public DataError {
 public:
  using DataError::DataError;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Carries every failed field, not just the first.
class ValidationError : public DataError {
 public:
  explicit ValidationError(std::vector<std::string> failures)
      : DataError(join(failures)), failures_(std::move(failures)) {}
  const std::vector<std::string>& failures() const noexcept { return failures_; }

 private:
  static std::string join(const std::vector<std::string>& items) {
    std::string out = "validation failed:";
    for (const auto& item : items) out += " " + item + ";";
    return out;
  }
  std::vector<std::string> failures_;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

class ConflictError : public Error {
 public:
  using Error::Error;
};

}  // namespace artemis
