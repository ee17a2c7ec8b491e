#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace corpsim {

/// Base class for every error the library raises. The CLI maps the
/// concrete type onto a process exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IngestError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class FeatureError : public Error {
 public:
  using Error::Error;
};

class VocabMismatchError : public Error {
 public:
  using Error::Error;
};

/// Constant vector, zero variance, or an estimate whose every sample was unusable.
class DegenerateVectorError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class CalibrationError : public Error {
 public:
  using Error::Error;
};

class OovError : public Error {
 public:
  using Error::Error;
};

class TrainError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed file content. `line()` is 1-based; 0 means "not tied to a line".
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t line = 0);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace corpsim
