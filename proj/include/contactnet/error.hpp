#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace contactnet {

// Every error raised by the library derives from Error. The CLI maps the
// three families onto its exit codes (config 1, data 2, I/O 3).
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

class DataError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

class ParseError : public DataError {
public:
  ParseError(std::size_t line, const std::string &what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

// A record that parses but breaks the report protocol (too many seen
// entries, a beacon reporting itself, duplicate seen entries).
class ProtocolViolation : public ParseError {
public:
  using ParseError::ParseError;
};

class SelfContactError : public DataError {
public:
  using DataError::DataError;
};

class OutOfRangeError : public DataError {
public:
  using DataError::DataError;
};

class LookupError : public DataError {
public:
  using DataError::DataError;
};

class InsufficientDataError : public DataError {
public:
  using DataError::DataError;
};

class DegenerateDataError : public DataError {
public:
  using DataError::DataError;
};

} // namespace contactnet
