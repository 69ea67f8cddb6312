#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qkd3 {

using Trit = std::uint8_t;

/// Sequence of values in {0, 1, 2}: keys, codes and ciphers.
class TritString {
 public:
  TritString() = default;
  /// Throws ValidationError on any value outside {0, 1, 2}.
  explicit TritString(std::vector<Trit> trits);
  TritString(std::initializer_list<int> trits);

  /// Accepts '0'/'1'/'2' with arbitrary whitespace in between.
  static TritString parse(std::string_view text);

  std::size_t size() const { return trits_.size(); }
  bool empty() const { return trits_.empty(); }
  Trit operator[](std::size_t i) const { return trits_[i]; }
  std::span<const Trit> view() const { return trits_; }
  const std::vector<Trit>& data() const { return trits_; }

  TritString substr(std::size_t pos, std::size_t count) const;
  void push_back(Trit t);
  void append(const TritString& other);

  /// Contiguous digits, or groups of `group` digits separated by spaces.
  std::string str(std::size_t group = 0) const;

  friend bool operator==(const TritString&, const TritString&) = default;

 private:
  std::vector<Trit> trits_;
};

/// Key file: `#` comment lines and one line of contiguous trit characters.
/// Blank lines are ignored; errors carry the offending line number.
TritString read_key_file(const std::filesystem::path& path);
TritString parse_key_text(std::string_view text);
void write_key_file(const std::filesystem::path& path, const TritString& key,
                    const std::vector<std::string>& comments = {});

}  // namespace qkd3
