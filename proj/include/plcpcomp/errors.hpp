#pragma once

#include <stdexcept>
#include <string>

namespace plcpcomp {

// Every failure the toolkit reports derives from Error; the CLI maps the
// concrete type to an exit status.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed user input (e.g. a text containing the sentinel byte).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Invalid budget, threshold or other configuration values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Spill files or user files that cannot be created, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A coding that cannot be decoded: cyclic references, references pointing
/// outside the text, or a factorization that does not tile the text.
class CodingError : public Error {
 public:
  using Error::Error;
};

/// Distinct failure classes of the compressed-file decoder.
enum class FormatErrorCode {
  bad_magic,
  truncated,
  bad_tag,
  length_mismatch,
  out_of_bounds,
};

const char* to_string(FormatErrorCode code);

class FormatError : public CodingError {
 public:
  FormatError(FormatErrorCode code, const std::string& what)
      : CodingError(std::string(to_string(code)) + ": " + what), code_(code) {}

  FormatErrorCode code() const noexcept { return code_; }

 private:
  FormatErrorCode code_;
};

}  // namespace plcpcomp
