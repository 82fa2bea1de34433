#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cec {

// Structured failure while decoding a byte stream or text format. `position`
// is a byte offset for binary formats and a 1-based line number for
// line-oriented ones; the rendered message always embeds it.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : std::runtime_error(message), position_(position) {}

  static ParseError at_byte(const std::string& message, std::size_t offset) {
    return ParseError(message + " (byte " + std::to_string(offset) + ")", offset);
  }

  static ParseError at_line(const std::string& message, std::size_t line) {
    return ParseError(message + ", line " + std::to_string(line), line);
  }

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_ = 0;
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& message) : std::runtime_error(message) {}
};

class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& message) : std::runtime_error(message) {}
};

}  // namespace cec
