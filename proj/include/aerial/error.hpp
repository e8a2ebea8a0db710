#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace aerial {

enum class ErrorKind {
  Usage,      // bad flags, missing files, invalid knob ranges
  Parse,      // malformed input document
  Integrity,  // well-formed input referencing missing ids
  Data,       // inputs parse but cannot be processed (layout mismatch, empty series)
  Internal    // non-finite loss, broken invariants
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Exception type thrown by every module. The CLI maps the kind to an exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace aerial
