#include "qkd3/trits.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "qkd3/errors.hpp"

namespace qkd3 {

TritString::TritString(std::vector<Trit> trits) : trits_(std::move(trits)) {
  for (Trit t : trits_) {
    if (t > 2) throw ValidationError("trit value out of range: " + std::to_string(int{t}));
  }
}

TritString::TritString(std::initializer_list<int> trits) {
  trits_.reserve(trits.size());
  for (int t : trits) {
    if (t < 0 || t > 2) throw ValidationError("trit value out of range: " + std::to_string(t));
    trits_.push_back(static_cast<Trit>(t));
  }
}

TritString TritString::parse(std::string_view text) {
  std::vector<Trit> out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c >= '0' && c <= '2') {
      out.push_back(static_cast<Trit>(c - '0'));
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      throw ValidationError("invalid trit character '" + std::string(1, c) + "' at position " + std::to_string(i));
    }
  }
  return TritString(std::move(out));
}

TritString TritString::substr(std::size_t pos, std::size_t count) const {
  if (pos > trits_.size()) throw ValidationError("substr position past end");
  const std::size_t end = std::min(trits_.size(), pos + count);
  return TritString(std::vector<Trit>(trits_.begin() + static_cast<std::ptrdiff_t>(pos),
                                      trits_.begin() + static_cast<std::ptrdiff_t>(end)));
}

void TritString::push_back(Trit t) {
  if (t > 2) throw ValidationError("trit value out of range: " + std::to_string(int{t}));
  trits_.push_back(t);
}

void TritString::append(const TritString& other) { trits_.insert(trits_.end(), other.trits_.begin(), other.trits_.end()); }

std::string TritString::str(std::size_t group) const {
  std::string s;
  s.reserve(trits_.size() + (group ? trits_.size() / group : 0));
  for (std::size_t i = 0; i < trits_.size(); ++i) {
    if (group && i && i % group == 0) s.push_back(' ');
    s.push_back(static_cast<char>('0' + trits_[i]));
  }
  return s;
}

TritString parse_key_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool have_key = false;
  TritString key;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    if (have_key) throw IoError("line " + std::to_string(line_no) + ": key file holds more than one key line");
    try {
      key = TritString::parse(line);
    } catch (const ValidationError& e) {
      throw IoError("line " + std::to_string(line_no) + ": " + e.what());
    }
    have_key = true;
  }
  if (!have_key) throw IoError("key file contains no key line");
  return key;
}

TritString read_key_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open key file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_key_text(buf.str());
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void write_key_file(const std::filesystem::path& path, const TritString& key, const std::vector<std::string>& comments) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write key file " + path.string());
  for (const auto& c : comments) out << "# " << c << '\n';
  out << key.str() << '\n';
  if (!out) throw IoError("failed writing key file " + path.string());
}

}  // namespace qkd3
