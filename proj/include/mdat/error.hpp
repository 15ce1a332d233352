#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mdat {

/// Failure classes. Each maps to a distinct CLI exit code.
enum class ErrorKind {
  kArgument,   // bad caller input (out-of-range index, unsupported rate, ...)
  kIo,         // file could not be opened, read, or written
  kFormat,     // malformed WAV / MDAT bytes
  kNumerical,  // singular system, solver non-convergence, symmetry violation
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Parse failure at a known byte position of the input.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::uint64_t offset)
      : Error(ErrorKind::kFormat, what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

}  // namespace mdat
