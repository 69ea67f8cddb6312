#include "report.hpp"

#include <array>
#include <charconv>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace qkd3::cli {

std::string format_number(double x) {
  std::array<char, 64> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc{}) return "nan";
  return std::string(buf.data(), end);
}

std::string fixed(double x, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << x;
  return s.str();
}

void Report::config(const std::vector<std::pair<std::string, std::string>>& entries) {
  line("Configuration:");
  for (const auto& [k, v] : entries) line("  " + k + " = " + v);
  blank();
}

void Report::print(std::ostream& out) const {
  out << title_ << '\n' << std::string(title_.size(), '=') << '\n';
  for (const auto& l : lines_) out << l << '\n';
  out << '\n' << kMachineMarker << '\n';
  for (const auto& [k, v] : machine_) out << k << ' ' << v << '\n';
}

}  // namespace qkd3::cli
