#include "qkd3/tritcrypt.hpp"

#include <vector>

#include "qkd3/errors.hpp"

namespace qkd3 {

namespace {

int symbol_index(char c) {
  if (c >= 'a' && c <= 'z') return c - 'a';
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c == ' ') return 26;
  return -1;
}

TritString digitwise(const TritString& x, const TritString& key, int sign) {
  if (x.size() != key.size()) {
    throw ValidationError("length mismatch: " + std::to_string(x.size()) + " trits vs key of " +
                          std::to_string(key.size()));
  }
  std::vector<Trit> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = static_cast<Trit>((x[i] + sign * key[i] + 3) % 3);
  return TritString(std::move(out));
}

}  // namespace

TritString encode(std::string_view text) {
  std::vector<Trit> out;
  out.reserve(kTritsPerSymbol * text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const int idx = symbol_index(text[i]);
    if (idx < 0) {
      throw ValidationError("character '" + std::string(1, text[i]) + "' at position " + std::to_string(i) +
                            " is outside the A-Z/space alphabet");
    }
    out.push_back(static_cast<Trit>(idx / 9));
    out.push_back(static_cast<Trit>((idx / 3) % 3));
    out.push_back(static_cast<Trit>(idx % 3));
  }
  return TritString(std::move(out));
}

std::string decode(const TritString& groups) {
  if (groups.size() % kTritsPerSymbol != 0) {
    throw ValidationError("code length " + std::to_string(groups.size()) + " is not a multiple of 3");
  }
  std::string text;
  text.reserve(groups.size() / kTritsPerSymbol);
  for (std::size_t i = 0; i < groups.size(); i += kTritsPerSymbol) {
    const int idx = 9 * groups[i] + 3 * groups[i + 1] + groups[i + 2];
    text.push_back(idx == 26 ? ' ' : static_cast<char>('A' + idx));
  }
  return text;
}

TritString encrypt(const TritString& code, const TritString& key) { return digitwise(code, key, +1); }

TritString decrypt(const TritString& cipher, const TritString& key) { return digitwise(cipher, key, -1); }

}  // namespace qkd3
