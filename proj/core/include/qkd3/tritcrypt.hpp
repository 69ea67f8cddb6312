#pragma once

// 27-symbol trit codec and digitwise mod-3 one-time pad.
//
// Alphabet: A = 0 ... Z = 25, space = 26, written as three base-3 digits with
// the most significant trit first ("T" = 201, " " = 222).

#include <string>
#include <string_view>

#include "qkd3/trits.hpp"

namespace qkd3 {

inline constexpr std::size_t kTritsPerSymbol = 3;

/// Lowercase letters are folded to uppercase; anything else outside A-Z and
/// space throws ValidationError.
TritString encode(std::string_view text);

/// Inverse of encode; the length must be a multiple of 3.
std::string decode(const TritString& groups);

/// (code + key) mod 3, digit by digit. Never reuse a key.
TritString encrypt(const TritString& code, const TritString& key);

/// (cipher - key) mod 3, digit by digit.
TritString decrypt(const TritString& cipher, const TritString& key);

}  // namespace qkd3
