#pragma once

#include <stdexcept>
#include <string>

namespace ggb {

enum class ErrorKind {
  Range,
  Parse,
  Schema,
  MissingFile,
  Underflow,
  Connection,
  Timeout,
  Protocol,
  UnsupportedContent,
  InvalidArgument,
  Io,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::Range: return "range";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Schema: return "schema";
    case ErrorKind::MissingFile: return "missing-file";
    case ErrorKind::Underflow: return "underflow";
    case ErrorKind::Connection: return "connection";
    case ErrorKind::Timeout: return "timeout";
    case ErrorKind::Protocol: return "protocol";
    case ErrorKind::UnsupportedContent: return "unsupported-content";
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message, bool retryable = false)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind),
        retryable_(retryable) {}

  ErrorKind kind() const { return kind_; }
  bool retryable() const { return retryable_; }

 private:
  ErrorKind kind_;
  bool retryable_;
};

}  // namespace ggb
