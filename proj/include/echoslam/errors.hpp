#pragma once

#include <stdexcept>
#include <string>

namespace echoslam {

// Base for all errors raised by the library. The CLI maps subclasses to
// exit codes: user/data problems exit 2, internal/format problems exit 3.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid options, shapes, or parameter combinations supplied by a caller.
struct ConfigError : Error {
  using Error::Error;
};

// Malformed or inconsistent input data (world files, datasets, maps).
struct DataError : Error {
  using Error::Error;
};

// A generator could not satisfy its constraints (e.g. no collision-free
// start pose after the retry budget).
struct GenerationError : Error {
  using Error::Error;
};

// Corrupt or incompatible binary artifacts (checkpoints, map files).
struct FormatError : Error {
  using Error::Error;
};

}  // namespace echoslam
