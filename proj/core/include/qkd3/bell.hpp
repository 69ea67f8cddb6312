#pragma once

// The three-outcome Bell parameter S3: exact evaluation, the canonical optimal
// settings, and a multi-start simplex search over measurement settings.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

#include "qkd3/linalg.hpp"

namespace qkd3 {

/// 4 / (6 sqrt(3) - 9): the largest S3 reachable with sum_j |jj> / sqrt(3).
inline const double kQuantumMax = 4.0 / (6.0 * std::numbers::sqrt3 - 9.0);
/// 1 + sqrt(11/3): the largest S3 over all two-qutrit states.
inline const double kNonMaximalMax = 1.0 + std::sqrt(11.0 / 3.0);
inline constexpr double kClassicalBound = 2.0;

/// table[k][l] = P(outcome k on A, outcome l on B).
using ProbabilityTable = std::array<std::array<double, kDim>, kDim>;

/// Two analyzer settings per side, indexed 1 and 2.
struct SettingsPair {
  MeasurementBasis a1, a2, b1, b2;

  const MeasurementBasis& a(int setting) const { return setting == 1 ? a1 : a2; }
  const MeasurementBasis& b(int setting) const { return setting == 1 ? b1 : b2; }
};

/// p[a][b][k] = P(A_a = B_b + k); a, b are zero-based setting indices here.
struct CorrelationProfile {
  std::array<std::array<std::array<double, kDim>, 2>, 2> p{};
};

struct BellValue {
  double s3 = 0.0;
  static constexpr double classical_bound = kClassicalBound;
  static double quantum_max() { return kQuantumMax; }

  bool violates_local_realism() const { return s3 > classical_bound; }
};

ProbabilityTable outcome_distribution(const MixedState& state, const MeasurementBasis& basis_a,
                                      const MeasurementBasis& basis_b);

/// sum_j table[j][(j + k) mod 3], i.e. the probability that B's outcome
/// exceeds A's by k.
double coincidence_mod3(const ProbabilityTable& table, int k);

/// Sign (+1, -1, 0) with which P(A_a = B_b + k) enters S3; a, b in {1, 2}.
/// B - 1 corresponds to k = 2 and B + 1 to k = 1.
int s3_coefficient(int a, int b, int k);

CorrelationProfile correlation_profile(const MixedState& state, const SettingsPair& settings);
double s3_from_profile(const CorrelationProfile& profile);
BellValue s3(const MixedState& state, const SettingsPair& settings);

/// Phase-basis offsets reaching kQuantumMax on sum_j |jj> / sqrt(3):
/// A at 0 and -1/2, B at -1/4 and +1/4.
SettingsPair canonical_settings();
/// canonical_settings() with B's bases relabeled for the source-state labeling.
SettingsPair canonical_source_settings();
/// Applies swap12 to both B bases.
SettingsPair relabel_b_swap12(const SettingsPair& settings);

/// S3 of V * pure + (1 - V) * white at the canonical settings of the maximal state.
double s3_vs_visibility(double visibility);
/// Visibility at which S3 drops to the classical bound.
double visibility_threshold();

enum class SettingsFamily {
  /// Four phase offsets, one per basis.
  PhaseOnly,
  /// Eight real parameters per basis through a product of complex rotations.
  FullLocalUnitary,
};

/// Basis whose vector k is column k of
/// diag(e^{i p0}, e^{i p1}, 1) G23(p2, p3) G13(p4, p5) G12(p6, p7).
MeasurementBasis unitary_basis(const std::array<double, 8>& params);

std::size_t parameter_count(SettingsFamily family);
SettingsPair settings_from_parameters(SettingsFamily family, const std::vector<double>& params);

struct OptimizerOptions {
  SettingsFamily family = SettingsFamily::PhaseOnly;
  /// Stop a restart once the simplex size drops below this.
  double tolerance = 1e-8;
  std::uint64_t seed = 1;
  int restarts = 20;
  int max_iterations = 20000;
  /// Random candidates screened per restart; the best seeds the simplex.
  int screen_samples = 256;
  /// Initial simplex edge; 0 picks a family default.
  double initial_step = 0.0;
};

struct OptimizationResult {
  SettingsPair settings;
  double s3 = 0.0;
  std::vector<double> parameters;
  bool converged = false;
  int best_restart = 0;
  /// Only set by optimize_s3_with_state: the optimal state parameter.
  double state_parameter = 0.0;
};

/// Maximizes S3 over the settings family for a fixed state. The reported value
/// is recomputed exactly at the returned settings.
OptimizationResult optimize_s3(const MixedState& state, const OptimizerOptions& options);

/// Maximizes jointly over settings and a scalar state parameter in [lo, hi].
OptimizationResult optimize_s3_with_state(const std::function<MixedState(double)>& state_family, double lo,
                                          double hi, const OptimizerOptions& options);

/// (|00> + g|11> + |22>) / sqrt(2 + g^2).
BipartiteState asymmetric_state(double g);

}  // namespace qkd3
