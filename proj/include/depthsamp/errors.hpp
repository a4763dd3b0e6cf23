#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace depthsamp {

// Base of every exception thrown by the library. The CLI maps these to
// exit code 2 (data error).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed file header or payload. offset() is the byte position at which
// parsing failed.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// File ended before the declared payload was read.
class TruncationError : public Error {
 public:
  TruncationError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

// More samples requested than the raster can hold.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// No valid depth available where a sample was requested.
class SamplingError : public Error {
 public:
  using Error::Error;
};

}  // namespace depthsamp
