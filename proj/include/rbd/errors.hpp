#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rbd {

// Malformed input data (graph files, wire bytes). Carries the byte offset
// (or line number for text inputs) where parsing stopped.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t offset)
      : std::runtime_error(msg + " (at offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_ = 0;
};

// Recognized container with wrong magic or unsupported version.
class FormatError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace rbd
