#pragma once

// One-pass parity-block error reduction for trit keys. Both keys are cut into
// consecutive 3-trit blocks; a block survives only if its digit sums agree mod 3,
// and the third trit of every surviving block is dropped to offset the disclosed
// parity.

#include <cstdint>
#include <string>

#include "qkd3/trits.hpp"

namespace qkd3 {

inline constexpr std::size_t kBlockSize = 3;

struct ReconciliationReport {
  std::size_t kept_blocks = 0;
  std::size_t discarded_blocks = 0;
  std::size_t output_length = 0;
  /// Positions where the reconciled keys still differ. Only knowable in simulation.
  std::size_t residual_mismatches = 0;
  /// Trailing trits past the last whole block, dropped before sifting.
  std::size_t dropped_trailing = 0;

  std::string to_text() const;
};

struct ReconciledKeys {
  TritString key_a;
  TritString key_b;
  ReconciliationReport report;
};

/// (t0 + t1 + t2) mod 3. Throws ValidationError unless exactly three trits.
Trit block_parity(std::span<const Trit> block);

/// Throws ValidationError when the key lengths differ.
ReconciledKeys parity_sift(const TritString& key_a, const TritString& key_b);

struct ResidualErrorEstimate {
  /// Mismatching output trits over all output trits (0 when nothing survives).
  double rate = 0.0;
  /// Delta-method standard error of the ratio estimate.
  double standard_error = 0.0;
  std::size_t kept_blocks = 0;
};

/// Monte-Carlo post-sift mismatch rate over `trials` blocks when each of B's
/// trits differs from A's independently with probability `error_rate`, the wrong
/// value uniform over the other two.
ResidualErrorEstimate residual_error_rate(double error_rate, std::size_t trials, std::uint64_t seed);

}  // namespace qkd3
