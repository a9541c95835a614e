#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nanogrid {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite or out-of-domain argument.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A result escaped the range the caller promised to keep it in.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Demanded output exceeds what a converter chain can deliver at rated power.
class InfeasibleDemand : public Error {
 public:
  using Error::Error;
};

class SingularFit : public Error {
 public:
  using Error::Error;
};

class UndefinedBaseline : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input data. `line` is 1-based, 0 when not tied to a line.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& source, std::size_t line, const std::string& what)
      : Error(format(source, line, what)), source_(source), line_(line) {}

  const std::string& source() const { return source_; }
  std::size_t line() const { return line_; }

 private:
  static std::string format(const std::string& source, std::size_t line, const std::string& what) {
    std::string msg = source;
    if (line > 0) msg += ":" + std::to_string(line);
    if (!msg.empty()) msg += ": ";
    return msg + what;
  }

  std::string source_;
  std::size_t line_;
};

}  // namespace nanogrid
