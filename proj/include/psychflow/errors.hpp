#pragma once

#include <stdexcept>
#include <string>

namespace psychflow {

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A file or string could not be read as the expected format
/// (bad JSON, malformed CSV row, unparseable timestamp, ...).
/// The message names the offending file/line/field where known.
struct ParseError : Error {
  using Error::Error;
};

/// Structurally well-formed input that violates a semantic rule
/// (probability outside [0,1], duplicate id, dangling reference, ...).
struct ValidationError : Error {
  using Error::Error;
};

/// Filesystem-level failure (missing file, unwritable directory).
struct IoError : Error {
  using Error::Error;
};

}  // namespace psychflow
