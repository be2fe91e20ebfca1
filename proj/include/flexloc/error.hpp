#pragma once

#include <stdexcept>
#include <string>

namespace flexloc {

// Base of every domain error raised by the library. The CLI maps these to
// exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Missing or unreadable inputs, invalid configuration values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed file contents. The message names the offending field.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Caller passed an argument that violates an operation's contract.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Operation invoked while its precondition does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Chat backend unreachable or answering garbage after all retries.
class TransportError : public Error {
 public:
  using Error::Error;
};

// Conversation no longer fits in the model's context window.
class ContextOverflowError : public Error {
 public:
  using Error::Error;
};

// Replay backend was asked for more turns than its script holds.
class ScriptExhaustedError : public Error {
 public:
  using Error::Error;
};

}  // namespace flexloc
