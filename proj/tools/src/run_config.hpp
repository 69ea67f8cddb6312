#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qkd3/bell.hpp"
#include "qkd3/protocol.hpp"

namespace qkd3::cli {

enum class EveBasis { Computational, Fourier };

/// Everything a command needs, read from `key = value` files and flags.
struct RunConfig {
  std::size_t n_rounds = 100000;
  std::uint64_t seed = 1;
  StateCoefficients coefficients = StateCoefficients::maximal();
  double visibility = 1.0;
  double background_fraction = 0.0;
  double detection_efficiency = 1.0;
  double key_crosstalk = 0.0;
  // When both are set, background_fraction and key_crosstalk are derived.
  std::optional<double> target_s3;
  std::optional<double> target_qter;
  bool eve_enabled = false;
  Arm eve_arm = Arm::B;
  EveBasis eve_basis = EveBasis::Computational;
  std::array<double, 3> setting_bias{1.0, 1.0, 1.0};
  SettingsFamily optimizer_family = SettingsFamily::PhaseOnly;
  int optimizer_restarts = 20;

  /// Throws ValidationError naming the offending field.
  void validate() const;

  SourceConfig source() const;
  EveConfig eve() const;
  PartyConfig party(Arm arm) const;
  OptimizerOptions optimizer() const;

  /// Effective settings in config-file syntax, in a fixed order.
  std::vector<std::pair<std::string, std::string>> entries() const;
};

/// Sets one field from its textual value. Throws ValidationError for unknown
/// keys or unparsable values.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

/// Parses `key = value` lines with `#` comments on top of `base`. Syntax errors
/// throw IoError with the line number; bad values throw ValidationError.
RunConfig parse_config(std::string_view text, RunConfig base = {});

RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

}  // namespace qkd3::cli
