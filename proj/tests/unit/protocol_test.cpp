#include "qkd3/protocol.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "../support/generators.hpp"
#include "qkd3/errors.hpp"

using namespace qkd3;
using qkd3::testing::Gen;

namespace {

PartyConfig fixed_setting(Arm arm, int setting) {
  auto cfg = PartyConfig::standard(arm);
  cfg.setting_probabilities = {0.0, 0.0, 0.0};
  cfg.setting_probabilities[static_cast<std::size_t>(setting - 1)] = 1.0;
  return cfg;
}

RoundRecord detected(std::uint64_t id, int sa, int oa, int sb, int ob) {
  return {id, sa, static_cast<Trit>(oa), sb, static_cast<Trit>(ob), true};
}

SettingsPair standard_settings() {
  const auto a = PartyConfig::standard(Arm::A);
  const auto b = PartyConfig::standard(Arm::B);
  return {a.bases[0], a.bases[1], b.bases[0], b.bases[1]};
}

}  // namespace

TEST(Sampling, KeySettingsFollowSourceSupport) {
  const auto a = fixed_setting(Arm::A, 3);
  const auto b = fixed_setting(Arm::B, 3);
  const auto rounds = run_session(5000, SourceConfig{}, EveConfig{}, a, b, 7);
  for (const auto& r : rounds) {
    ASSERT_TRUE(r.detected);
    ASSERT_EQ(r.setting_a, 3);
    ASSERT_EQ(r.setting_b, 3);
    // Only |00>, |12>, |21> carry weight.
    ASSERT_EQ((*r.outcome_a + *r.outcome_b) % 3, 0);
  }
}

TEST(Sampling, FullBackgroundIsUniform) {
  SourceConfig src;
  src.background_fraction = 1.0;
  const auto rounds = run_session(90000, src, EveConfig{}, fixed_setting(Arm::A, 3), fixed_setting(Arm::B, 3), 3);
  std::array<double, 9> counts{};
  for (const auto& r : rounds) counts[3 * *r.outcome_a + *r.outcome_b] += 1.0;
  double chi2 = 0.0;
  for (double c : counts) chi2 += (c - 10000.0) * (c - 10000.0) / 10000.0;
  EXPECT_LT(chi2, qkd3::testing::kChiSquare999[8]);
}

TEST(Sampling, DetectionEfficiencyDropsOutcomes) {
  SourceConfig src;
  src.detection_efficiency = 1.0 / 9.0;
  const std::size_t n = 90000;
  const auto rounds = run_session(n, src, EveConfig{}, PartyConfig::standard(Arm::A), PartyConfig::standard(Arm::B), 5);
  std::size_t hits = 0;
  for (const auto& r : rounds) {
    EXPECT_EQ(r.detected, r.outcome_a.has_value());
    hits += r.detected;
  }
  const double sigma = std::sqrt(n * (1.0 / 9.0) * (8.0 / 9.0));
  EXPECT_NEAR(static_cast<double>(hits), n / 9.0, 5.0 * sigma);
}

TEST(Sampling, SameSeedSameSession) {
  const auto a = PartyConfig::standard(Arm::A);
  const auto b = PartyConfig::standard(Arm::B);
  SourceConfig src;
  src.visibility = 0.9;
  src.background_fraction = 0.05;
  EXPECT_EQ(run_session(2000, src, EveConfig{}, a, b, 42), run_session(2000, src, EveConfig{}, a, b, 42));
  EXPECT_NE(run_session(2000, src, EveConfig{}, a, b, 42), run_session(2000, src, EveConfig{}, a, b, 43));
}

TEST(Sampling, RoundsDependOnlyOnTheirId) {
  const auto a = PartyConfig::standard(Arm::A);
  const auto b = PartyConfig::standard(Arm::B);
  const auto rounds = run_session(300, SourceConfig{}, EveConfig{}, a, b, 9);
  RandomStream rng(9, 217);
  EXPECT_EQ(sample_round(rng, SourceConfig{}, EveConfig{}, a, b, 217), rounds[217]);
}

TEST(Sampling, SettingFrequenciesAreUniform) {
  const std::size_t n = 200000;
  const auto rounds = run_session(n, SourceConfig{}, EveConfig{}, PartyConfig::standard(Arm::A),
                                  PartyConfig::standard(Arm::B), 11);
  std::array<double, 9> counts{};
  for (const auto& r : rounds) counts[3 * (r.setting_a - 1) + (r.setting_b - 1)] += 1.0;
  const double sigma = std::sqrt(n * (1.0 / 9.0) * (8.0 / 9.0));
  for (double c : counts) EXPECT_NEAR(c, n / 9.0, 5.0 * sigma);
}

TEST(Sampling, ZeroRoundsRejected) {
  EXPECT_THROW(run_session(0, SourceConfig{}, EveConfig{}, PartyConfig{}, PartyConfig{}, 1), ValidationError);
}

TEST(Sampling, InvalidConfigRejected) {
  SourceConfig src;
  src.visibility = 1.2;
  EXPECT_THROW(run_session(1, src, EveConfig{}, PartyConfig{}, PartyConfig{}, 1), ValidationError);
  src = SourceConfig{};
  src.detection_efficiency = 0.0;
  EXPECT_THROW(run_session(1, src, EveConfig{}, PartyConfig{}, PartyConfig{}, 1), ValidationError);
  PartyConfig biased;
  biased.setting_probabilities = {0.5, 0.5, 0.5};
  EXPECT_THROW(run_session(1, SourceConfig{}, EveConfig{}, biased, PartyConfig{}, 1), ValidationError);
}

// Empirical 3x3 tables against outcome_distribution, per setting pair.
TEST(Sampling, EmpiricalTablesConvergeToBornRule) {
  const std::size_t n = 100000;
  const int reps = 100;
  for (const auto& [sa, sb] : std::array<std::pair<int, int>, 3>{{{1, 1}, {2, 1}, {3, 3}}}) {
    const RoundSampler sampler(SourceConfig{}, EveConfig{}, fixed_setting(Arm::A, sa), fixed_setting(Arm::B, sb));
    const auto& table = sampler.table(sa, sb);
    int passed = 0;
    for (int rep = 0; rep < reps; ++rep) {
      std::array<double, 9> counts{};
      for (std::size_t i = 0; i < n; ++i) {
        RandomStream rng(1000 + rep, i);
        const auto r = sampler.sample(rng, i);
        counts[3 * *r.outcome_a + *r.outcome_b] += 1.0;
      }
      double chi2 = 0.0;
      std::size_t cells = 0;
      for (std::size_t c = 0; c < 9; ++c) {
        const double expected = n * table[c / 3][c % 3];
        if (expected < 1e-9) {
          ASSERT_EQ(counts[c], 0.0);
          continue;
        }
        ++cells;
        chi2 += (counts[c] - expected) * (counts[c] - expected) / expected;
      }
      passed += chi2 < qkd3::testing::kChiSquare999[cells - 1];
    }
    EXPECT_GE(passed, 99) << "settings (" << sa << ", " << sb << ")";
  }
}

TEST(Sift, PartitionsDetectedRounds) {
  const std::vector<RoundRecord> rounds{
      detected(0, 3, 0, 3, 0), detected(1, 1, 2, 2, 1), detected(2, 1, 0, 3, 1),
      detected(3, 3, 1, 2, 2), {4, 1, std::nullopt, 1, std::nullopt, false}, detected(5, 2, 2, 2, 2),
  };
  const auto s = sift(rounds);
  EXPECT_EQ(s.key_rounds.size(), 1u);
  EXPECT_EQ(s.bell_rounds.size(), 2u);
  EXPECT_EQ(s.discarded.size(), 2u);
  EXPECT_EQ(s.undetected, 1u);
  const auto f = sifted_fractions(s);
  EXPECT_DOUBLE_EQ(f.key + f.bell + f.discard, 5.0 / 6.0);
}

TEST(Sift, AllKeySettingsGoToKey) {
  const auto rounds = run_session(500, SourceConfig{}, EveConfig{}, fixed_setting(Arm::A, 3),
                                  fixed_setting(Arm::B, 3), 2);
  const auto s = sift(rounds);
  EXPECT_EQ(s.key_rounds.size(), 500u);
  EXPECT_TRUE(s.bell_rounds.empty());
}

TEST(Sift, MixedSettingIsDiscarded) {
  const auto s = sift({detected(0, 1, 0, 3, 0)});
  EXPECT_EQ(s.discarded.size(), 1u);
}

TEST(Estimate, PerfectCorrelationsGiveFour) {
  BellCounts counts{};
  // Put every count on the cell that feeds a +1 coefficient.
  for (int a = 1; a <= 2; ++a)
    for (int b = 1; b <= 2; ++b) {
      int plus_k = 0;
      while (s3_coefficient(a, b, plus_k) != 1) ++plus_k;
      for (std::size_t k = 0; k < 3; ++k) counts[a - 1][b - 1][k][(k + plus_k) % 3] = 50.0;
    }
  const auto est = estimate_s3(counts);
  EXPECT_DOUBLE_EQ(est.value, 4.0);
  EXPECT_DOUBLE_EQ(est.sigma, 0.0);
}

TEST(Estimate, MissingSettingPairIsInsufficient) {
  const std::vector<RoundRecord> rounds{detected(0, 1, 0, 1, 0), detected(1, 1, 0, 2, 0), detected(2, 2, 0, 1, 0)};
  EXPECT_THROW(estimate_s3(rounds), InsufficientDataError);
}

TEST(Estimate, ExactProbabilitiesReproduceExactS3) {
  // Counts proportional to exact probabilities give the exact S3.
  const auto rho = channel_state(SourceConfig{}, EveConfig{});
  const auto settings = standard_settings();
  BellCounts counts{};
  for (int a = 1; a <= 2; ++a)
    for (int b = 1; b <= 2; ++b) {
      const auto t = outcome_distribution(rho, settings.a(a), settings.b(b));
      for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t l = 0; l < 3; ++l) counts[a - 1][b - 1][k][l] = 1e6 * t[k][l];
    }
  EXPECT_NEAR(estimate_s3(counts).value, kQuantumMax, 1e-12);
}

TEST(Estimate, SigmaMatchesSpreadAcrossSeeds) {
  const auto a = PartyConfig::standard(Arm::A);
  const auto b = PartyConfig::standard(Arm::B);
  std::vector<double> values;
  double sigma = 0.0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto est = estimate_s3(sift(run_session(20000, SourceConfig{}, EveConfig{}, a, b, seed)).bell_rounds);
    values.push_back(est.value);
    sigma += est.sigma / 40.0;
  }
  double mean = 0.0;
  for (double v : values) mean += v / 40.0;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean) / 39.0;
  // Sample SD of 40 draws is within about 25% of the true SD with high probability.
  EXPECT_NEAR(std::sqrt(var) / sigma, 1.0, 0.35);
  EXPECT_NEAR(mean, kQuantumMax, 4.0 * sigma / std::sqrt(40.0));
}

TEST(Keys, RemapsBobsOutcomes) {
  const auto keys = extract_keys({detected(0, 3, 1, 3, 2), detected(1, 3, 0, 3, 0), detected(2, 3, 2, 3, 1)});
  EXPECT_EQ(keys.key_a, TritString({1, 0, 2}));
  EXPECT_EQ(keys.key_b, TritString({1, 0, 2}));
  EXPECT_THROW(extract_keys({detected(0, 1, 0, 3, 0)}), ValidationError);
}

TEST(Keys, IdealSourceHasNoErrors) {
  const auto rounds = run_session(10000, SourceConfig{}, EveConfig{}, fixed_setting(Arm::A, 3),
                                  fixed_setting(Arm::B, 3), 8);
  const auto keys = extract_keys(sift(rounds).key_rounds);
  EXPECT_EQ(keys.key_a.size(), 10000u);
  EXPECT_EQ(qter(keys.key_a, keys.key_b), 0.0);
}

TEST(Qter, Examples) {
  Gen g(5);
  const auto a = g.trits(150);
  std::vector<Trit> b(a.data());
  for (std::size_t i = 0; i < 14; ++i) b[i * 10] = static_cast<Trit>((b[i * 10] + 1) % 3);
  EXPECT_NEAR(qter(a, TritString(b)), 14.0 / 150.0, 1e-15);
  EXPECT_NEAR(qter(a, TritString(b)), 0.0933, 1e-4);
  EXPECT_EQ(qter(a, a), 0.0);
  EXPECT_EQ(qter(TritString{0, 1, 2}, TritString{1, 2, 0}), 1.0);
  EXPECT_THROW(qter(TritString{0}, TritString{0, 1}), ValidationError);
}

TEST(Verdict, Examples) {
  const auto v1 = security_verdict(2.688, 0.171, 0.093);
  EXPECT_TRUE(v1.secure);
  EXPECT_NEAR(v1.sigmas_above_bound, 4.02, 0.005);
  EXPECT_TRUE(v1.qter_within_bound);
  EXPECT_NE(v1.report.find("SECURE"), std::string::npos);

  const auto v2 = security_verdict(1.9, 0.05, 0.01);
  EXPECT_FALSE(v2.secure);
  EXPECT_NE(v2.report.find("NOT SECURE"), std::string::npos);

  const auto v3 = security_verdict(2.825, 0.052, 0.074);
  EXPECT_TRUE(v3.secure);
  EXPECT_NEAR(v3.sigmas_above_bound, 15.9, 0.05);

  EXPECT_FALSE(security_verdict(2.5, 0.1, 0.3).qter_within_bound);
}

TEST(Noise, BackgroundStrictlyLowersS3) {
  const auto settings = standard_settings();
  double previous = 1e9;
  for (int i = 0; i <= 20; ++i) {
    SourceConfig src;
    src.background_fraction = i / 20.0;
    const double v = s3(channel_state(src, EveConfig{}), settings).s3;
    EXPECT_LT(v, previous);
    previous = v;
  }
  EXPECT_NEAR(previous, 0.0, 1e-12);
}

TEST(Noise, KeyCrosstalkLeavesBellTablesUnchanged) {
  SourceConfig src;
  src.key_crosstalk = 0.3;
  const RoundSampler noisy(src, EveConfig{}, PartyConfig::standard(Arm::A), PartyConfig::standard(Arm::B));
  const RoundSampler clean(SourceConfig{}, EveConfig{}, PartyConfig::standard(Arm::A), PartyConfig::standard(Arm::B));
  for (int a = 1; a <= 2; ++a)
    for (int b = 1; b <= 2; ++b) EXPECT_EQ(noisy.table(a, b), clean.table(a, b));
  EXPECT_NEAR(exact_key_error_rate(src, EveConfig{}, PartyConfig::standard(Arm::A), PartyConfig::standard(Arm::B)),
              0.3, 1e-12);
}

TEST(Noise, CalibrationHitsBothTargetsExactly) {
  const auto src = calibrate_noise(StateCoefficients::maximal(), 2.688, 0.093);
  EXPECT_NEAR(src.background_fraction, 0.06437114388228649, 1e-12);
  EXPECT_NEAR(src.key_crosstalk, 0.053531807779316994, 1e-12);
  EXPECT_NEAR(s3(channel_state(src, EveConfig{}), standard_settings()).s3, 2.688, 1e-12);
  EXPECT_NEAR(exact_key_error_rate(src, EveConfig{}, PartyConfig::standard(Arm::A), PartyConfig::standard(Arm::B)),
              0.093, 1e-12);

  // Non-maximal coefficients keep the same key support, so calibration still works.
  const auto measured = calibrate_noise(StateCoefficients::measured(), 2.688, 0.093);
  EXPECT_NEAR(exact_key_error_rate(measured, EveConfig{}, PartyConfig::standard(Arm::A),
                                   PartyConfig::standard(Arm::B)),
              0.093, 1e-12);

  EXPECT_THROW(calibrate_noise(StateCoefficients::maximal(), 3.0, 0.1), ValidationError);
  EXPECT_THROW(calibrate_noise(StateCoefficients::maximal(), 2.688, 0.01), ValidationError);
}

TEST(Eve, ComputationalInterceptKeepsKeysClean) {
  EveConfig eve;
  eve.enabled = true;
  const auto rho = channel_state(SourceConfig{}, eve);
  EXPECT_TRUE(rho.is_separable());
  EXPECT_EQ(rho.components().size(), 3u);
  const auto z = MeasurementBasis::computational();
  EXPECT_NEAR(joint_probability(rho, z, 1, z, 2), 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(joint_probability(rho, z, 1, z, 1), 0.0, 1e-12);
  EXPECT_LE(s3(rho, standard_settings()).s3, kClassicalBound + 1e-9);
}

TEST(Eve, RandomBasesNeverViolate) {
  Gen g(21);
  for (int i = 0; i < 50; ++i) {
    EveConfig eve;
    eve.enabled = true;
    eve.arm = i % 2 == 0 ? Arm::A : Arm::B;
    eve.basis = g.basis();
    const auto rho = channel_state(SourceConfig{}, eve);
    EXPECT_TRUE(rho.is_separable());
    EXPECT_LE(s3(rho, standard_settings()).s3, kClassicalBound + 1e-9);
  }
}

TEST(Eve, EstimateFallsBelowBoundPlusThreeSigma) {
  EveConfig eve;
  eve.enabled = true;
  const auto rounds = run_session(100000, SourceConfig{}, eve, PartyConfig::standard(Arm::A),
                                  PartyConfig::standard(Arm::B), 4);
  const auto est = estimate_s3(sift(rounds).bell_rounds);
  EXPECT_LT(est.value, kClassicalBound + 3.0 * est.sigma);
}

TEST(Protocol, TranscriptFollowsMessageOrder) {
  const auto rounds = run_session(20000, SourceConfig{}, EveConfig{}, PartyConfig::standard(Arm::A),
                                  PartyConfig::standard(Arm::B), 6);
  const auto run = run_protocol(rounds);
  ASSERT_EQ(run.transcript.size(), 6u);
  EXPECT_EQ(run.transcript[0].topic, "settings");
  EXPECT_EQ(run.transcript[0].sender, Arm::A);
  EXPECT_EQ(run.transcript[1].sender, Arm::B);
  EXPECT_EQ(run.transcript[2].topic, "bell-data");
  EXPECT_EQ(run.transcript[2].sender, Arm::B);
  EXPECT_EQ(run.transcript[3].topic, "bell-result");
  EXPECT_EQ(run.transcript[5].topic, "verdict");

  const auto s = sift(rounds);
  EXPECT_EQ(run.transcript[2].items, s.bell_rounds.size());
  const auto direct = estimate_s3(s.bell_rounds);
  EXPECT_DOUBLE_EQ(run.result.s3_estimate, direct.value);
  EXPECT_DOUBLE_EQ(run.result.s3_sigma, direct.sigma);
  EXPECT_EQ(run.result.key_a, extract_keys(s.key_rounds).key_a);
  EXPECT_TRUE(run.result.secure);
  EXPECT_EQ(run.result.qter, 0.0);
}

TEST(Protocol, IdenticalSeedsGiveIdenticalResults) {
  SourceConfig src = calibrate_noise(StateCoefficients::maximal(), 2.688, 0.093);
  auto go = [&] {
    return run_protocol(run_session(30000, src, EveConfig{}, PartyConfig::standard(Arm::A),
                                    PartyConfig::standard(Arm::B), 99))
        .result;
  };
  const auto x = go();
  const auto y = go();
  EXPECT_EQ(x.s3_estimate, y.s3_estimate);
  EXPECT_EQ(x.s3_sigma, y.s3_sigma);
  EXPECT_EQ(x.qter, y.qter);
  EXPECT_EQ(x.key_a, y.key_a);
  EXPECT_EQ(x.key_b, y.key_b);
}

TEST(Transcript, RoundTrip) {
  SourceConfig src;
  src.detection_efficiency = 0.5;
  const auto rounds = run_session(1000, src, EveConfig{}, PartyConfig::standard(Arm::A),
                                  PartyConfig::standard(Arm::B), 12);
  std::stringstream buf;
  write_transcript(buf, rounds, {"seed 12", "rounds 1000"});
  const auto t = read_transcript(buf);
  EXPECT_EQ(t.records, rounds);
  ASSERT_EQ(t.header.size(), 3u);
  EXPECT_EQ(t.header[0], "seed 12");
}

TEST(Transcript, ErrorsNameTheLine) {
  auto fails_at = [](const std::string& text, const std::string& line) {
    std::istringstream in(text);
    try {
      read_transcript(in);
    } catch (const IoError& e) {
      return std::string(e.what()).find("line " + line) != std::string::npos;
    }
    return false;
  };
  EXPECT_TRUE(fails_at("# h\n0 1 0 1 0 1\n1 4 0 1 0 1\n", "3"));
  EXPECT_TRUE(fails_at("0 1 0 1 0\n", "1"));
  EXPECT_TRUE(fails_at("0 1 3 1 0 1\n", "1"));
  EXPECT_TRUE(fails_at("0 1 - 1 - 1\n", "1"));
  EXPECT_TRUE(fails_at("x 1 0 1 0 1\n", "1"));
  EXPECT_TRUE(fails_at("0 1 0 1 0 1 extra\n", "1"));
}
