#pragma once

// Entanglement-based qutrit key distribution: Monte-Carlo rounds, sifting,
// Bell-parameter estimation, key extraction and the security verdict.
//
// Round physics: the source emits an exact MixedState, an optional
// intercept-resend eavesdropper collapses one arm, both parties measure (Born
// rule), background replaces the outcome pair with a uniform one, and a single
// Bernoulli draw decides whether the coincidence is registered.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qkd3/bell.hpp"
#include "qkd3/linalg.hpp"
#include "qkd3/rng.hpp"
#include "qkd3/trits.hpp"

namespace qkd3 {

/// Largest tolerable trit error rate for the qutrit Ekert scheme (imported bound).
inline constexpr double kQterNoiseBound = 0.225;

/// Settings 1 and 2 are the Bell settings, setting 3 the key setting.
inline constexpr int kKeySetting = 3;

struct PartyConfig {
  std::array<double, 3> setting_probabilities{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  std::array<MeasurementBasis, 3> bases{MeasurementBasis::computational(), MeasurementBasis::computational(),
                                        MeasurementBasis::computational()};

  /// Canonical Bell settings for the given arm (B relabeled for the source
  /// state) and the computational basis as the key setting.
  static PartyConfig standard(Arm arm);

  void validate() const;
};

struct SourceConfig {
  StateCoefficients coefficients = StateCoefficients::maximal();
  /// Weight of the pure state against white noise.
  double visibility = 1.0;
  /// Probability that a round's outcome pair is replaced by a uniform pair.
  double background_fraction = 0.0;
  /// Probability that a round yields a registered coincidence.
  double detection_efficiency = 1.0;
  /// Probability that B's key-setting analyzer reports a neighbouring mode
  /// (outcome l -> l +- 1, split evenly). Bell settings are unaffected, so this
  /// raises the key error rate without touching S3.
  double key_crosstalk = 0.0;

  void validate() const;
};

struct EveConfig {
  bool enabled = false;
  Arm arm = Arm::B;
  MeasurementBasis basis = MeasurementBasis::computational();
};

/// Source whose exact S3 at the standard settings and exact key error rate
/// hit the targets: background supplies the S3 deficit (and 2/3 of its weight
/// as key errors), key crosstalk supplies the remaining key errors.
/// Throws ValidationError when the targets are out of reach.
SourceConfig calibrate_noise(const StateCoefficients& coefficients, double target_s3, double target_qter);

/// Source state including visibility noise.
MixedState emitted_state(const SourceConfig& source);

/// Exact post-measurement ensemble of an intercept-resend attack: each pure
/// component splits into one product state per eavesdropper outcome.
MixedState apply_intercept_resend(const MixedState& state, const EveConfig& eve);

/// Exact state seen by the analyzers: emitted, intercepted, then background-mixed.
MixedState channel_state(const SourceConfig& source, const EveConfig& eve);

/// Exact probability that a key round yields differing trits, including
/// background and key crosstalk.
double exact_key_error_rate(const SourceConfig& source, const EveConfig& eve, const PartyConfig& a,
                            const PartyConfig& b);

struct RoundRecord {
  std::uint64_t round_id = 0;
  int setting_a = 1;
  std::optional<Trit> outcome_a;
  int setting_b = 1;
  std::optional<Trit> outcome_b;
  bool detected = false;

  friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

/// Precomputes the nine per-setting outcome distributions once per session.
class RoundSampler {
 public:
  RoundSampler(const SourceConfig& source, const EveConfig& eve, const PartyConfig& a, const PartyConfig& b);

  RoundRecord sample(RandomStream& rng, std::uint64_t round_id) const;

  /// Outcome table before background for settings (sa, sb) in 1..3, key
  /// crosstalk included.
  const ProbabilityTable& table(int setting_a, int setting_b) const;

 private:
  SourceConfig source_;
  std::array<double, 3> prob_a_;
  std::array<double, 3> prob_b_;
  std::array<std::array<ProbabilityTable, 3>, 3> tables_;
  // Same tables flattened to cell index 3k + l.
  std::array<std::array<std::array<double, kDim * kDim>, 3>, 3> flat_;
};

/// One round from a freshly built sampler. Prefer RoundSampler for sessions.
RoundRecord sample_round(RandomStream& rng, const SourceConfig& source, const EveConfig& eve, const PartyConfig& a,
                         const PartyConfig& b, std::uint64_t round_id = 0);

/// Round i draws from RandomStream(seed, i). Throws ValidationError for n = 0.
std::vector<RoundRecord> run_session(std::size_t n_rounds, const SourceConfig& source, const EveConfig& eve,
                                     const PartyConfig& a, const PartyConfig& b, std::uint64_t seed);

struct SiftedRounds {
  std::vector<RoundRecord> key_rounds;
  std::vector<RoundRecord> bell_rounds;
  /// Detected rounds with mixed or unused setting combinations.
  std::vector<RoundRecord> discarded;
  std::size_t undetected = 0;
};

SiftedRounds sift(const std::vector<RoundRecord>& records);

struct SiftedFractions {
  double key = 0.0;
  double bell = 0.0;
  double discard = 0.0;
};

/// Fractions of all rounds; they sum to the detected fraction.
SiftedFractions sifted_fractions(const SiftedRounds& sifted);

struct S3Estimate {
  double value = 0.0;
  double sigma = 0.0;
};

/// counts[a][b][k][l] for Bell settings a, b (zero-based) and outcomes k, l.
using BellCounts = std::array<std::array<std::array<std::array<double, 3>, 3>, 2>, 2>;

BellCounts tally_bell_counts(const std::vector<RoundRecord>& bell_rounds);

/// S3 from empirical frequencies; sigma propagates independent Poisson counts
/// through the estimator. Throws InsufficientDataError when a setting pair is empty.
S3Estimate estimate_s3(const BellCounts& counts);
S3Estimate estimate_s3(const std::vector<RoundRecord>& bell_rounds);

struct KeyPair {
  TritString key_a;
  TritString key_b;
};

/// A keeps its outcome; B exchanges 1 and 2 so ideal keys coincide.
KeyPair extract_keys(const std::vector<RoundRecord>& key_rounds);

/// Fraction of differing positions. Throws ValidationError on length mismatch.
double qter(const TritString& key_a, const TritString& key_b);

struct SecurityVerdict {
  bool secure = false;
  double sigmas_above_bound = 0.0;
  bool qter_within_bound = false;
  std::string report;
};

SecurityVerdict security_verdict(double s3_estimate, double s3_sigma, double qter);

struct SessionResult {
  double s3_estimate = 0.0;
  double s3_sigma = 0.0;
  double qter = 0.0;
  SiftedFractions fractions;
  TritString key_a;
  TritString key_b;
  bool secure = false;
};

/// Public classical-channel message.
struct Message {
  Arm sender = Arm::A;
  std::string topic;
  std::size_t items = 0;
  std::string summary;
};

struct ProtocolRun {
  SessionResult result;
  SecurityVerdict verdict;
  std::vector<Message> transcript;
};

/// Post-processing carried out by two party objects that only see their own
/// local records plus what the other side announces. B announces all
/// Bell-round outcomes; A computes S3. Keys are then compared in full to
/// report the error rate.
ProtocolRun run_protocol(const std::vector<RoundRecord>& records);

/// Round transcript: `#` header lines followed by
/// `round_id setting_a outcome_a setting_b outcome_b detected`, with `-` for
/// outcomes of undetected rounds.
void write_transcript(std::ostream& out, const std::vector<RoundRecord>& records,
                      const std::vector<std::string>& header = {});

struct Transcript {
  std::vector<std::string> header;
  std::vector<RoundRecord> records;
};

/// Throws IoError naming the offending line.
Transcript read_transcript(std::istream& in);

}  // namespace qkd3
