#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace atlas {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. `line` and `column` are 1-based; 0 means unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column = 0)
      : Error(Format(what, line, column)), message_(what), line_(line), column_(column) {}

  /// The message without the position prefix.
  const std::string& message() const { return message_; }

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  static std::string Format(const std::string& what, std::size_t line,
                            std::size_t column) {
    std::string out;
    if (line > 0) out += "line " + std::to_string(line);
    if (column > 0) out += (out.empty() ? "column " : ", column ") + std::to_string(column);
    return out.empty() ? what : out + ": " + what;
  }

  std::string message_;
  std::size_t line_;
  std::size_t column_;
};

/// A value outside the domain an operation accepts.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Misuse of an API: wrong shapes, missing keys, violated preconditions.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace atlas
