#pragma once

#include <stdexcept>
#include <string>

namespace neuroevo {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class DegenerateSamplesError : public Error {
 public:
  using Error::Error;
};

class MissingKeyError : public Error {
 public:
  explicit MissingKeyError(const std::string& key)
      : Error("missing metric '" + key + "'"), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Raised for user-facing configuration problems (CLI exit code 1).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace neuroevo
