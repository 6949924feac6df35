#pragma once

#include <stdexcept>
#include <string>

namespace hairrec {

// File could not be opened / read at all.
struct FileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Header bytes do not describe a file of the expected format.
struct MalformedHeaderError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// File ended before the payload announced by its header.
struct TruncatedFileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Two inputs that must agree on shape (dims, grid spec, ...) do not.
struct DimensionMismatchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A domain invariant was violated (non-orthonormal rotation, even kernel
// size, thresholds out of range, ...).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace hairrec
