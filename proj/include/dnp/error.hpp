#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dnpgcn {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateVector : public Error {
 public:
  using Error::Error;
};

/// Malformed input text. `line()` is 1-based, 0 when not line-oriented.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Invalid user-supplied configuration (model shape, flags, options).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace dnpgcn
