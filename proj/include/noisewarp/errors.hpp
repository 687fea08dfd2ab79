#pragma once

#include <stdexcept>
#include <string>

namespace noisewarp {

// Malformed or truncated serialized data (.flo files, noise containers,
// scene documents read from disk).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Statistic is undefined for the input, e.g. Moran's I of a constant field.
class DegenerateInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace noisewarp
