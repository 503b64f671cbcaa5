#pragma once

#include <stdexcept>
#include <string>

namespace poserefer {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file; carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": " + what), file_(file), line_(line) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

// A record parsed fine but breaks a dataset or config invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class MissingKeyError : public Error {
 public:
  explicit MissingKeyError(const std::string& key)
      : Error("missing key: '" + key + "'"), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// NaN/Inf in gradients or losses during training.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace poserefer
