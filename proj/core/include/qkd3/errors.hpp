#pragma once

#include <stdexcept>
#include <string>

namespace qkd3 {

// Bad input values: non-normalized states, out-of-range config fields,
// length mismatches, characters outside the alphabet.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Not enough recorded data to compute an estimate (e.g. a Bell setting pair
// never occurred).
class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File or format problems while reading transcripts and key files.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qkd3
