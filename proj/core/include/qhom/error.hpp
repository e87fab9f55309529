#pragma once

// Library-wide error taxonomy. Every failure mode the library can signal is
// one of these kinds; the CLI maps kinds onto its exit-code contract.

#include <stdexcept>
#include <string>

namespace qhom {

enum class ErrorKind {
  DivisionByZero,
  FloorTooShallow,
  ValBelowFloor,
  NotAUnit,
  PresetMismatch,
  TruncationUnsound,
  NotCoprime,
  PrecisionExhausted,
  ZeroInComponent,
  ZeroPolynomial,
  PairingVanishes,
  SlopeNotStabilized,
  ParseError,
  InvalidArgument,
};

const char* to_string(ErrorKind kind);

/// Exception carrying a machine-readable kind plus a human-readable message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace qhom
