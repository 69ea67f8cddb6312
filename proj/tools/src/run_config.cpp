#include "run_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qkd3/errors.hpp"
#include "report.hpp"

namespace qkd3::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

ValidationError bad_value(std::string_view key, std::string_view value, std::string_view expected) {
  return ValidationError(std::string(key) + ": expected " + std::string(expected) + ", got '" + std::string(value) +
                         "'");
}

double to_double(std::string_view key, std::string_view value) {
  double x = 0.0;
  const auto v = trim(value);
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || end != v.data() + v.size() || !std::isfinite(x)) throw bad_value(key, value, "a number");
  return x;
}

std::uint64_t to_unsigned(std::string_view key, std::string_view value) {
  std::uint64_t x = 0;
  const auto v = trim(value);
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || end != v.data() + v.size()) throw bad_value(key, value, "a non-negative integer");
  return x;
}

bool to_flag(std::string_view key, std::string_view value) {
  const auto v = trim(value);
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  throw bad_value(key, value, "true or false");
}

std::array<double, 3> to_triple(std::string_view key, std::string_view value) {
  std::istringstream in{std::string(value)};
  std::array<double, 3> out{};
  std::string tok;
  for (auto& x : out) {
    if (!(in >> tok)) throw bad_value(key, value, "three numbers");
    x = to_double(key, tok);
  }
  if (in >> tok) throw bad_value(key, value, "three numbers");
  return out;
}

void check_unit(const char* key, double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw ValidationError(std::string(key) + " must lie in [0, 1], got " + format_number(x));
}

}  // namespace

void apply_setting(RunConfig& c, std::string_view key_in, std::string_view value) {
  const auto key = trim(key_in);
  const auto v = trim(value);
  if (key == "n_rounds") {
    c.n_rounds = to_unsigned(key, v);
  } else if (key == "seed") {
    c.seed = to_unsigned(key, v);
  } else if (key == "coefficients") {
    if (v == "maximal") {
      c.coefficients = StateCoefficients::maximal();
    } else if (v == "measured") {
      c.coefficients = StateCoefficients::measured();
    } else {
      const auto t = to_triple(key, v);
      c.coefficients = {t[0], t[1], t[2]};
    }
  } else if (key == "visibility") {
    c.visibility = to_double(key, v);
  } else if (key == "background_fraction") {
    c.background_fraction = to_double(key, v);
  } else if (key == "detection_efficiency") {
    c.detection_efficiency = to_double(key, v);
  } else if (key == "key_crosstalk") {
    c.key_crosstalk = to_double(key, v);
  } else if (key == "target_s3") {
    c.target_s3 = v == "none" ? std::nullopt : std::optional<double>(to_double(key, v));
  } else if (key == "target_qter") {
    c.target_qter = v == "none" ? std::nullopt : std::optional<double>(to_double(key, v));
  } else if (key == "eve_enabled") {
    c.eve_enabled = to_flag(key, v);
  } else if (key == "eve_arm") {
    if (v == "A" || v == "a") {
      c.eve_arm = Arm::A;
    } else if (v == "B" || v == "b") {
      c.eve_arm = Arm::B;
    } else {
      throw bad_value(key, v, "A or B");
    }
  } else if (key == "eve_basis") {
    if (v == "computational") {
      c.eve_basis = EveBasis::Computational;
    } else if (v == "fourier") {
      c.eve_basis = EveBasis::Fourier;
    } else {
      throw bad_value(key, v, "computational or fourier");
    }
  } else if (key == "setting_bias") {
    c.setting_bias = to_triple(key, v);
  } else if (key == "optimizer_family") {
    if (v == "phase") {
      c.optimizer_family = SettingsFamily::PhaseOnly;
    } else if (v == "full") {
      c.optimizer_family = SettingsFamily::FullLocalUnitary;
    } else {
      throw bad_value(key, v, "phase or full");
    }
  } else if (key == "optimizer_restarts") {
    c.optimizer_restarts = static_cast<int>(to_unsigned(key, v));
  } else {
    throw ValidationError("unknown config key '" + std::string(key) + "'");
  }
}

void RunConfig::validate() const {
  if (n_rounds == 0) throw ValidationError("n_rounds must be positive");
  try {
    normalize(coefficients);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("coefficients: ") + e.what());
  }
  check_unit("visibility", visibility);
  check_unit("background_fraction", background_fraction);
  check_unit("detection_efficiency", detection_efficiency);
  if (detection_efficiency == 0.0) throw ValidationError("detection_efficiency must be positive");
  check_unit("key_crosstalk", key_crosstalk);
  if (target_s3.has_value() != target_qter.has_value()) {
    throw ValidationError("target_s3 and target_qter must be given together");
  }
  double total = 0.0;
  for (double w : setting_bias) {
    if (!(w >= 0.0)) throw ValidationError("setting_bias entries must be non-negative");
    total += w;
  }
  if (!(total > 0.0)) throw ValidationError("setting_bias must have a positive sum");
  if (optimizer_restarts < 1) throw ValidationError("optimizer_restarts must be at least 1");
}

SourceConfig RunConfig::source() const {
  validate();
  SourceConfig s;
  if (target_s3) {
    s = calibrate_noise(coefficients, *target_s3, *target_qter);
  } else {
    s.coefficients = coefficients;
    s.background_fraction = background_fraction;
    s.key_crosstalk = key_crosstalk;
  }
  s.visibility = visibility;
  s.detection_efficiency = detection_efficiency;
  s.validate();
  return s;
}

EveConfig RunConfig::eve() const {
  EveConfig e;
  e.enabled = eve_enabled;
  e.arm = eve_arm;
  e.basis = eve_basis == EveBasis::Computational ? MeasurementBasis::computational() : phase_basis(eve_arm, 0.0);
  return e;
}

PartyConfig RunConfig::party(Arm arm) const {
  validate();
  PartyConfig p = PartyConfig::standard(arm);
  const double total = setting_bias[0] + setting_bias[1] + setting_bias[2];
  for (std::size_t i = 0; i < 3; ++i) p.setting_probabilities[i] = setting_bias[i] / total;
  // Guard the sum against rounding so PartyConfig validation holds.
  p.setting_probabilities[2] = 1.0 - p.setting_probabilities[0] - p.setting_probabilities[1];
  return p;
}

OptimizerOptions RunConfig::optimizer() const {
  OptimizerOptions o;
  o.family = optimizer_family;
  o.seed = seed;
  o.restarts = optimizer_restarts;
  return o;
}

std::vector<std::pair<std::string, std::string>> RunConfig::entries() const {
  auto triple = [](double a, double b, double c) {
    return format_number(a) + " " + format_number(b) + " " + format_number(c);
  };
  std::vector<std::pair<std::string, std::string>> e{
      {"n_rounds", std::to_string(n_rounds)},
      {"seed", std::to_string(seed)},
      {"coefficients", triple(coefficients.alpha, coefficients.beta, coefficients.gamma)},
      {"visibility", format_number(visibility)},
      {"background_fraction", format_number(background_fraction)},
      {"detection_efficiency", format_number(detection_efficiency)},
      {"key_crosstalk", format_number(key_crosstalk)},
      {"target_s3", target_s3 ? format_number(*target_s3) : "none"},
      {"target_qter", target_qter ? format_number(*target_qter) : "none"},
      {"eve_enabled", eve_enabled ? "true" : "false"},
      {"eve_arm", eve_arm == Arm::A ? "A" : "B"},
      {"eve_basis", eve_basis == EveBasis::Computational ? "computational" : "fourier"},
      {"setting_bias", triple(setting_bias[0], setting_bias[1], setting_bias[2])},
      {"optimizer_family", optimizer_family == SettingsFamily::PhaseOnly ? "phase" : "full"},
      {"optimizer_restarts", std::to_string(optimizer_restarts)},
  };
  return e;
}

RunConfig parse_config(std::string_view text, RunConfig base) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    const auto raw = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    start = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;

    auto line = raw.substr(0, raw.find('#'));
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw IoError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw IoError("config line " + std::to_string(line_no) + ": missing key");
    try {
      apply_setting(base, key, line.substr(eq + 1));
    } catch (const ValidationError& e) {
      throw ValidationError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str(), std::move(base));
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

}  // namespace qkd3::cli
