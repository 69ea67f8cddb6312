#include "qkd3/protocol.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "qkd3/errors.hpp"

namespace qkd3 {

namespace {

void check_probability(double p, const char* field, bool allow_zero = true) {
  if (!std::isfinite(p) || p < 0.0 || p > 1.0 || (!allow_zero && p == 0.0)) {
    throw ValidationError(std::string(field) + " must lie in " + (allow_zero ? "[0, 1]" : "(0, 1]") + ", got " +
                          std::to_string(p));
  }
}

std::size_t draw_index(RandomStream& rng, const double* probs, std::size_t n) {
  double u = rng.uniform();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (u < probs[i]) return i;
    u -= probs[i];
  }
  return n - 1;
}

}  // namespace

PartyConfig PartyConfig::standard(Arm arm) {
  const SettingsPair canon = canonical_source_settings();
  PartyConfig cfg;
  if (arm == Arm::A) {
    cfg.bases = {canon.a1, canon.a2, MeasurementBasis::computational()};
  } else {
    cfg.bases = {canon.b1, canon.b2, MeasurementBasis::computational()};
  }
  return cfg;
}

void PartyConfig::validate() const {
  double total = 0.0;
  for (double p : setting_probabilities) {
    check_probability(p, "setting probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ValidationError("setting probabilities must sum to 1");
}

void SourceConfig::validate() const {
  normalize(coefficients);
  check_probability(visibility, "visibility");
  check_probability(background_fraction, "background_fraction");
  check_probability(detection_efficiency, "detection_efficiency", false);
  check_probability(key_crosstalk, "key_crosstalk");
}

SourceConfig calibrate_noise(const StateCoefficients& coefficients, double target_s3, double target_qter) {
  SourceConfig cfg;
  cfg.coefficients = coefficients;
  const PartyConfig a = PartyConfig::standard(Arm::A);
  const PartyConfig b = PartyConfig::standard(Arm::B);
  const SettingsPair settings{a.bases[0], a.bases[1], b.bases[0], b.bases[1]};
  const double clean = s3(MixedState::pure(make_state(coefficients)), settings).s3;
  if (!(target_s3 >= 0.0 && target_s3 <= clean)) {
    throw ValidationError("target S3 must lie in [0, " + std::to_string(clean) + "] for this state");
  }
  cfg.background_fraction = 1.0 - target_s3 / clean;
  // Crosstalk turns a match into an error with probability x and an error into
  // a match with probability x/2, so the key error rate is linear in x.
  const double bg = cfg.background_fraction;
  const double clean_error = (exact_key_error_rate(cfg, EveConfig{}, a, b) - bg * 2.0 / 3.0) / (1.0 - bg);
  const double q0 = (1.0 - bg) * clean_error + bg * 2.0 / 3.0;
  const double slope = (1.0 - bg) * (1.0 - 1.5 * clean_error);
  const double x = slope > 0.0 ? (target_qter - q0) / slope : -1.0;
  if (!(x >= 0.0 && x <= 1.0)) {
    throw ValidationError("target QTER is not reachable together with the target S3");
  }
  cfg.key_crosstalk = x;
  return cfg;
}

MixedState emitted_state(const SourceConfig& source) {
  source.validate();
  return MixedState::with_visibility(make_state(source.coefficients), source.visibility);
}

MixedState apply_intercept_resend(const MixedState& state, const EveConfig& eve) {
  if (!eve.enabled) return state;
  std::vector<WeightedState> out;
  for (const auto& c : state.components()) {
    for (std::size_t m = 0; m < kDim; ++m) {
      // Project the intercepted arm onto |e_m> and resend |e_m>.
      const Ket3& e = eve.basis.vector(m);
      BipartiteState::Amplitudes amps{};
      for (std::size_t a = 0; a < kDim; ++a)
        for (std::size_t b = 0; b < kDim; ++b) {
          if (eve.arm == Arm::B) {
            Complex proj{};
            for (std::size_t j = 0; j < kDim; ++j) proj += std::conj(e[j]) * c.state.amplitude(a, j);
            amps[kDim * a + b] = proj * e[b];
          } else {
            Complex proj{};
            for (std::size_t j = 0; j < kDim; ++j) proj += std::conj(e[j]) * c.state.amplitude(j, b);
            amps[kDim * a + b] = e[a] * proj;
          }
        }
      double p = 0.0;
      for (const auto& x : amps) p += std::norm(x);
      if (p <= 1e-300) continue;
      out.push_back({c.weight * p, BipartiteState::normalize(amps)});
    }
  }
  // Renormalize the weights against rounding so the mixture invariant holds.
  double total = state.white_noise_weight();
  for (const auto& c : out) total += c.weight;
  for (auto& c : out) c.weight /= total;
  return MixedState(std::move(out), state.white_noise_weight() / total);
}

MixedState channel_state(const SourceConfig& source, const EveConfig& eve) {
  return apply_intercept_resend(emitted_state(source), eve).mixed_with_white(source.background_fraction);
}

double exact_key_error_rate(const SourceConfig& source, const EveConfig& eve, const PartyConfig& a,
                            const PartyConfig& b) {
  const RoundSampler sampler(source, eve, a, b);
  const auto& t = sampler.table(kKeySetting, kKeySetting);
  double error = 0.0;
  for (std::size_t k = 0; k < kDim; ++k)
    for (std::size_t l = 0; l < kDim; ++l) {
      // B's trit is swap12(l); it equals k exactly when k + l = 0 mod 3.
      if ((k + l) % kDim == 0) continue;
      error += (1.0 - source.background_fraction) * t[k][l] + source.background_fraction / 9.0;
    }
  return error;
}

RoundSampler::RoundSampler(const SourceConfig& source, const EveConfig& eve, const PartyConfig& a,
                           const PartyConfig& b)
    : source_(source), prob_a_(a.setting_probabilities), prob_b_(b.setting_probabilities) {
  a.validate();
  b.validate();
  const MixedState state = apply_intercept_resend(emitted_state(source), eve);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      tables_[i][j] = outcome_distribution(state, a.bases[i], b.bases[j]);
      if (j + 1 == static_cast<std::size_t>(kKeySetting) && source.key_crosstalk > 0.0) {
        const auto clean = tables_[i][j];
        const double x = source.key_crosstalk;
        for (std::size_t k = 0; k < kDim; ++k)
          for (std::size_t l = 0; l < kDim; ++l) {
            tables_[i][j][k][l] = (1.0 - x) * clean[k][l] +
                                  0.5 * x * (clean[k][(l + 1) % kDim] + clean[k][(l + 2) % kDim]);
          }
      }
      for (std::size_t c = 0; c < kDim * kDim; ++c) flat_[i][j][c] = tables_[i][j][c / kDim][c % kDim];
    }
}

const ProbabilityTable& RoundSampler::table(int setting_a, int setting_b) const {
  if (setting_a < 1 || setting_a > 3 || setting_b < 1 || setting_b > 3) {
    throw ValidationError("setting index out of range");
  }
  return tables_[static_cast<std::size_t>(setting_a - 1)][static_cast<std::size_t>(setting_b - 1)];
}

RoundRecord RoundSampler::sample(RandomStream& rng, std::uint64_t round_id) const {
  RoundRecord r;
  r.round_id = round_id;
  const std::size_t sa = draw_index(rng, prob_a_.data(), 3);
  const std::size_t sb = draw_index(rng, prob_b_.data(), 3);
  r.setting_a = static_cast<int>(sa) + 1;
  r.setting_b = static_cast<int>(sb) + 1;

  std::size_t cell = draw_index(rng, flat_[sa][sb].data(), kDim * kDim);
  if (rng.bernoulli(source_.background_fraction)) cell = rng.below(kDim * kDim);
  r.detected = rng.bernoulli(source_.detection_efficiency);
  if (r.detected) {
    r.outcome_a = static_cast<Trit>(cell / kDim);
    r.outcome_b = static_cast<Trit>(cell % kDim);
  }
  return r;
}

RoundRecord sample_round(RandomStream& rng, const SourceConfig& source, const EveConfig& eve, const PartyConfig& a,
                         const PartyConfig& b, std::uint64_t round_id) {
  return RoundSampler(source, eve, a, b).sample(rng, round_id);
}

std::vector<RoundRecord> run_session(std::size_t n_rounds, const SourceConfig& source, const EveConfig& eve,
                                     const PartyConfig& a, const PartyConfig& b, std::uint64_t seed) {
  if (n_rounds == 0) throw ValidationError("a session needs at least one round");
  const RoundSampler sampler(source, eve, a, b);
  std::vector<RoundRecord> records;
  records.reserve(n_rounds);
  for (std::size_t i = 0; i < n_rounds; ++i) {
    RandomStream rng(seed, i);
    records.push_back(sampler.sample(rng, i));
  }
  return records;
}

SiftedRounds sift(const std::vector<RoundRecord>& records) {
  SiftedRounds out;
  for (const auto& r : records) {
    if (!r.detected) {
      ++out.undetected;
    } else if (r.setting_a == kKeySetting && r.setting_b == kKeySetting) {
      out.key_rounds.push_back(r);
    } else if (r.setting_a != kKeySetting && r.setting_b != kKeySetting) {
      out.bell_rounds.push_back(r);
    } else {
      out.discarded.push_back(r);
    }
  }
  return out;
}

SiftedFractions sifted_fractions(const SiftedRounds& s) {
  const double total =
      static_cast<double>(s.key_rounds.size() + s.bell_rounds.size() + s.discarded.size() + s.undetected);
  if (total == 0.0) return {};
  return {static_cast<double>(s.key_rounds.size()) / total, static_cast<double>(s.bell_rounds.size()) / total,
          static_cast<double>(s.discarded.size()) / total};
}

BellCounts tally_bell_counts(const std::vector<RoundRecord>& bell_rounds) {
  BellCounts counts{};
  for (const auto& r : bell_rounds) {
    if (!r.detected || !r.outcome_a || !r.outcome_b) continue;
    if (r.setting_a < 1 || r.setting_a > 2 || r.setting_b < 1 || r.setting_b > 2) {
      throw ValidationError("round " + std::to_string(r.round_id) + " is not a Bell round");
    }
    counts[r.setting_a - 1][r.setting_b - 1][*r.outcome_a][*r.outcome_b] += 1.0;
  }
  return counts;
}

S3Estimate estimate_s3(const BellCounts& counts) {
  S3Estimate est;
  double variance = 0.0;
  for (int a = 1; a <= 2; ++a)
    for (int b = 1; b <= 2; ++b) {
      const auto& c = counts[a - 1][b - 1];
      double n = 0.0;
      double weighted = 0.0;
      for (std::size_t k = 0; k < kDim; ++k)
        for (std::size_t l = 0; l < kDim; ++l) {
          n += c[k][l];
          weighted += s3_coefficient(a, b, static_cast<int>((l + kDim - k) % kDim)) * c[k][l];
        }
      if (n == 0.0) {
        throw InsufficientDataError("no Bell rounds recorded for settings (" + std::to_string(a) + ", " +
                                    std::to_string(b) + ")");
      }
      const double pair_value = weighted / n;
      est.value += pair_value;
      // d(pair_value)/d(count) = (coefficient - pair_value) / n for every cell.
      for (std::size_t k = 0; k < kDim; ++k)
        for (std::size_t l = 0; l < kDim; ++l) {
          const double d = s3_coefficient(a, b, static_cast<int>((l + kDim - k) % kDim)) - pair_value;
          variance += c[k][l] * d * d / (n * n);
        }
    }
  est.sigma = std::sqrt(variance);
  return est;
}

S3Estimate estimate_s3(const std::vector<RoundRecord>& bell_rounds) {
  return estimate_s3(tally_bell_counts(bell_rounds));
}

KeyPair extract_keys(const std::vector<RoundRecord>& key_rounds) {
  static constexpr std::array<Trit, 3> kSwap12{0, 2, 1};
  KeyPair keys;
  for (const auto& r : key_rounds) {
    if (!r.detected || !r.outcome_a || !r.outcome_b) continue;
    if (r.setting_a != kKeySetting || r.setting_b != kKeySetting) {
      throw ValidationError("round " + std::to_string(r.round_id) + " is not a key round");
    }
    keys.key_a.push_back(*r.outcome_a);
    keys.key_b.push_back(kSwap12[*r.outcome_b]);
  }
  return keys;
}

double qter(const TritString& key_a, const TritString& key_b) {
  if (key_a.size() != key_b.size()) {
    throw ValidationError("key length mismatch: " + std::to_string(key_a.size()) + " vs " +
                          std::to_string(key_b.size()));
  }
  if (key_a.empty()) return 0.0;
  std::size_t errors = 0;
  for (std::size_t i = 0; i < key_a.size(); ++i) errors += key_a[i] != key_b[i];
  return static_cast<double>(errors) / static_cast<double>(key_a.size());
}

SecurityVerdict security_verdict(double s3_estimate, double s3_sigma, double qter_value) {
  SecurityVerdict v;
  v.secure = s3_estimate > kClassicalBound;
  v.sigmas_above_bound = s3_sigma > 0.0 ? (s3_estimate - kClassicalBound) / s3_sigma : 0.0;
  v.qter_within_bound = qter_value < kQterNoiseBound;

  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  out << "S3 = " << s3_estimate << " +- " << s3_sigma << ": ";
  if (v.secure) {
    out << "Bell inequality violated by " << std::setprecision(2) << v.sigmas_above_bound
        << " sigma, key is SECURE\n";
  } else {
    out << "no violation of the local-realism bound 2, key is NOT SECURE\n";
  }
  out << std::setprecision(4) << "QTER = " << qter_value << " (" << (v.qter_within_bound ? "below" : "above")
      << " the noise bound " << kQterNoiseBound << ")\n";
  v.report = out.str();
  return v;
}

namespace {

struct LocalEntry {
  std::uint64_t round_id = 0;
  int setting = 0;
  Trit outcome = 0;
};

// One side of the protocol. It holds only its own detections and learns about
// the other side exclusively through announced messages.
class Party {
 public:
  Party(Arm arm, std::vector<LocalEntry> log) : arm_(arm), log_(std::move(log)) {}

  Message announce_settings() const {
    return {arm_, "settings", log_.size(), "setting choice for every registered round"};
  }
  std::vector<std::pair<std::uint64_t, int>> settings() const {
    std::vector<std::pair<std::uint64_t, int>> out;
    out.reserve(log_.size());
    for (const auto& e : log_) out.emplace_back(e.round_id, e.setting);
    return out;
  }

  void learn_partner_settings(const std::vector<std::pair<std::uint64_t, int>>& announced) {
    partner_settings_.clear();
    partner_settings_.reserve(announced.size());
    for (const auto& [id, s] : announced) partner_settings_.emplace(id, s);
  }

  int partner_setting(std::uint64_t round_id) const {
    const auto it = partner_settings_.find(round_id);
    return it == partner_settings_.end() ? 0 : it->second;
  }

  bool is_bell(const LocalEntry& e) const {
    const int p = partner_setting(e.round_id);
    return e.setting != kKeySetting && p != 0 && p != kKeySetting;
  }
  bool is_key(const LocalEntry& e) const {
    return e.setting == kKeySetting && partner_setting(e.round_id) == kKeySetting;
  }

  std::vector<LocalEntry> bell_entries() const {
    std::vector<LocalEntry> out;
    for (const auto& e : log_)
      if (is_bell(e)) out.push_back(e);
    return out;
  }

  TritString key() const {
    static constexpr std::array<Trit, 3> kSwap12{0, 2, 1};
    TritString k;
    for (const auto& e : log_)
      if (is_key(e)) k.push_back(arm_ == Arm::B ? kSwap12[e.outcome] : e.outcome);
    return k;
  }

  Arm arm() const { return arm_; }

 private:
  Arm arm_;
  std::vector<LocalEntry> log_;
  std::unordered_map<std::uint64_t, int> partner_settings_;
};

}  // namespace

ProtocolRun run_protocol(const std::vector<RoundRecord>& records) {
  std::vector<LocalEntry> log_a;
  std::vector<LocalEntry> log_b;
  for (const auto& r : records) {
    if (!r.detected || !r.outcome_a || !r.outcome_b) continue;
    log_a.push_back({r.round_id, r.setting_a, *r.outcome_a});
    log_b.push_back({r.round_id, r.setting_b, *r.outcome_b});
  }
  Party alice(Arm::A, std::move(log_a));
  Party bob(Arm::B, std::move(log_b));

  ProtocolRun run;
  auto& channel = run.transcript;

  // Basis reconciliation.
  channel.push_back(alice.announce_settings());
  bob.learn_partner_settings(alice.settings());
  channel.push_back(bob.announce_settings());
  alice.learn_partner_settings(bob.settings());

  // B discloses all Bell-round data; A evaluates S3 from her entries and his.
  const auto bob_bell = bob.bell_entries();
  channel.push_back({Arm::B, "bell-data", bob_bell.size(), "setting and outcome of every Bell round"});
  std::unordered_map<std::uint64_t, LocalEntry> bob_by_id;
  for (const auto& e : bob_bell) bob_by_id.emplace(e.round_id, e);
  std::vector<RoundRecord> bell_view;
  for (const auto& e : alice.bell_entries()) {
    const auto it = bob_by_id.find(e.round_id);
    if (it == bob_by_id.end()) continue;
    bell_view.push_back({e.round_id, e.setting, e.outcome, it->second.setting, it->second.outcome, true});
  }

  auto& result = run.result;
  const S3Estimate est = estimate_s3(bell_view);
  result.s3_estimate = est.value;
  result.s3_sigma = est.sigma;
  {
    std::ostringstream s;
    s << std::setprecision(6) << "S3 = " << est.value << " +- " << est.sigma;
    channel.push_back({Arm::A, "bell-result", bell_view.size(), s.str()});
  }

  result.key_a = alice.key();
  result.key_b = bob.key();
  // Full-key comparison, possible only in simulation.
  channel.push_back({Arm::B, "key-comparison", result.key_b.size(), "sifted key disclosed for error-rate diagnostics"});
  result.qter = qter(result.key_a, result.key_b);
  result.fractions = sifted_fractions(sift(records));

  run.verdict = security_verdict(result.s3_estimate, result.s3_sigma, result.qter);
  result.secure = run.verdict.secure;
  channel.push_back({Arm::A, "verdict", 0, result.secure ? "secure" : "not secure"});
  return run;
}

void write_transcript(std::ostream& out, const std::vector<RoundRecord>& records, const std::vector<std::string>& header) {
  for (const auto& h : header) out << "# " << h << '\n';
  out << "# round_id setting_a outcome_a setting_b outcome_b detected\n";
  for (const auto& r : records) {
    out << r.round_id << ' ' << r.setting_a << ' ';
    if (r.outcome_a) out << int{*r.outcome_a}; else out << '-';
    out << ' ' << r.setting_b << ' ';
    if (r.outcome_b) out << int{*r.outcome_b}; else out << '-';
    out << ' ' << (r.detected ? 1 : 0) << '\n';
  }
}

namespace {

std::optional<Trit> parse_outcome(const std::string& tok, std::size_t line_no) {
  if (tok == "-") return std::nullopt;
  if (tok.size() == 1 && tok[0] >= '0' && tok[0] <= '2') return static_cast<Trit>(tok[0] - '0');
  throw IoError("line " + std::to_string(line_no) + ": invalid outcome '" + tok + "'");
}

int parse_setting(const std::string& tok, std::size_t line_no) {
  if (tok.size() == 1 && tok[0] >= '1' && tok[0] <= '3') return tok[0] - '0';
  throw IoError("line " + std::to_string(line_no) + ": invalid setting '" + tok + "'");
}

}  // namespace

Transcript read_transcript(std::istream& in) {
  Transcript t;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      auto body = line.substr(first + 1);
      if (!body.empty() && body[0] == ' ') body.erase(0, 1);
      t.header.push_back(body);
      continue;
    }
    std::istringstream fields(line);
    std::string id, sa, oa, sb, ob, det, extra;
    if (!(fields >> id >> sa >> oa >> sb >> ob >> det) || (fields >> extra)) {
      throw IoError("line " + std::to_string(line_no) + ": expected 6 fields");
    }
    RoundRecord r;
    try {
      std::size_t used = 0;
      r.round_id = std::stoull(id, &used);
      if (used != id.size()) throw std::invalid_argument(id);
    } catch (const std::exception&) {
      throw IoError("line " + std::to_string(line_no) + ": invalid round id '" + id + "'");
    }
    r.setting_a = parse_setting(sa, line_no);
    r.setting_b = parse_setting(sb, line_no);
    r.outcome_a = parse_outcome(oa, line_no);
    r.outcome_b = parse_outcome(ob, line_no);
    if (det != "0" && det != "1") throw IoError("line " + std::to_string(line_no) + ": detected flag must be 0 or 1");
    r.detected = det == "1";
    if (r.detected != (r.outcome_a.has_value() && r.outcome_b.has_value()) ||
        r.outcome_a.has_value() != r.outcome_b.has_value()) {
      throw IoError("line " + std::to_string(line_no) + ": outcomes must be present exactly when detected");
    }
    t.records.push_back(r);
  }
  return t;
}

}  // namespace qkd3
