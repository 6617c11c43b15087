#pragma once

#include <stdexcept>
#include <string>

namespace sitext {

enum class ErrorCode {
  invalid_argument,  // caller supplied a value outside the contract
  not_found,         // unknown document, label, or session
  io,                // file could not be opened, read, or written
  parse,             // malformed input file
  precondition,      // state does not permit the operation
};

/// Exception type thrown by every sitext operation. The code lets callers
/// (notably the HTTP layer) map failures onto status codes without parsing
/// messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sitext
