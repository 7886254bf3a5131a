#pragma once

#include <stdexcept>
#include <string>

namespace spikecam {

// Base of every recoverable error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

// Truncated or over-long payloads; a kind of format error.
class LengthError : public FormatError {
 public:
  using FormatError::FormatError;
};

// Structurally valid data carrying forbidden content (e.g. nonzero padding).
class CorruptionError : public FormatError {
 public:
  using FormatError::FormatError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class BoundsError : public Error {
 public:
  using Error::Error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ManifestError : public Error {
 public:
  using Error::Error;
};

// Raised when caller-supplied state contradicts a documented invariant.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace spikecam
