#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace qkd3::cli {

/// Shortest decimal that round-trips to the same double.
std::string format_number(double x);

/// Fixed-point with `digits` decimals, for the human-readable part.
std::string fixed(double x, int digits = 4);

/// Human-readable lines followed by a machine block of `name value` lines.
class Report {
 public:
  explicit Report(std::string title) : title_(std::move(title)) {}

  void line(std::string text) { lines_.push_back(std::move(text)); }
  void blank() { lines_.emplace_back(); }

  void value(const std::string& name, double x) { machine_.emplace_back(name, format_number(x)); }
  void value(const std::string& name, std::size_t n) { machine_.emplace_back(name, std::to_string(n)); }
  void value(const std::string& name, int n) { machine_.emplace_back(name, std::to_string(n)); }
  void value(const std::string& name, bool b) { machine_.emplace_back(name, b ? "true" : "false"); }
  void value(const std::string& name, const char* s) { machine_.emplace_back(name, s); }
  void value(const std::string& name, std::string s) { machine_.emplace_back(name, std::move(s)); }

  void config(const std::vector<std::pair<std::string, std::string>>& entries);

  void print(std::ostream& out) const;

  const std::vector<std::pair<std::string, std::string>>& machine() const { return machine_; }

 private:
  std::string title_;
  std::vector<std::string> lines_;
  std::vector<std::pair<std::string, std::string>> machine_;
};

/// Separator between the human text and the machine block.
inline constexpr const char* kMachineMarker = "# machine-readable";

}  // namespace qkd3::cli
