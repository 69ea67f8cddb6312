#include "qkd3/reconciliation.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <vector>

#include "qkd3/errors.hpp"
#include "qkd3/rng.hpp"

namespace qkd3 {

std::string ReconciliationReport::to_text() const {
  std::ostringstream out;
  out << "kept_blocks " << kept_blocks << '\n'
      << "discarded_blocks " << discarded_blocks << '\n'
      << "output_length " << output_length << '\n'
      << "residual_mismatches " << residual_mismatches << '\n';
  if (dropped_trailing) out << "dropped_trailing " << dropped_trailing << '\n';
  return out.str();
}

Trit block_parity(std::span<const Trit> block) {
  if (block.size() != kBlockSize) {
    throw ValidationError("parity block must hold 3 trits, got " + std::to_string(block.size()));
  }
  return static_cast<Trit>((block[0] + block[1] + block[2]) % 3);
}

ReconciledKeys parity_sift(const TritString& key_a, const TritString& key_b) {
  if (key_a.size() != key_b.size()) {
    throw ValidationError("key length mismatch: " + std::to_string(key_a.size()) + " vs " +
                          std::to_string(key_b.size()));
  }
  const std::size_t blocks = key_a.size() / kBlockSize;
  std::vector<Trit> out_a;
  std::vector<Trit> out_b;
  out_a.reserve(2 * blocks);
  out_b.reserve(2 * blocks);

  ReconciliationReport report;
  report.dropped_trailing = key_a.size() - blocks * kBlockSize;
  const auto a = key_a.view();
  const auto b = key_b.view();
  for (std::size_t i = 0; i < blocks; ++i) {
    const auto block_a = a.subspan(i * kBlockSize, kBlockSize);
    const auto block_b = b.subspan(i * kBlockSize, kBlockSize);
    if (block_parity(block_a) != block_parity(block_b)) {
      ++report.discarded_blocks;
      continue;
    }
    ++report.kept_blocks;
    for (std::size_t j = 0; j + 1 < kBlockSize; ++j) {
      out_a.push_back(block_a[j]);
      out_b.push_back(block_b[j]);
      if (block_a[j] != block_b[j]) ++report.residual_mismatches;
    }
  }
  report.output_length = out_a.size();
  return {TritString(std::move(out_a)), TritString(std::move(out_b)), report};
}

ResidualErrorEstimate residual_error_rate(double error_rate, std::size_t trials, std::uint64_t seed) {
  if (!(error_rate >= 0.0 && error_rate <= 1.0)) throw ValidationError("error rate must lie in [0, 1]");
  if (trials == 0) throw ValidationError("residual_error_rate needs at least one trial");

  // Per-block mismatches m_i and output lengths o_i for the ratio estimator.
  std::vector<double> mismatches;
  std::vector<double> outputs;
  mismatches.reserve(trials);
  outputs.reserve(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    RandomStream rng(seed, t);
    std::array<Trit, kBlockSize> err{};
    for (auto& e : err) e = rng.bernoulli(error_rate) ? static_cast<Trit>(1 + rng.below(2)) : Trit{0};
    // A's block is irrelevant to the parity comparison; only the error pattern matters.
    const bool kept = (err[0] + err[1] + err[2]) % 3 == 0;
    const double m = kept ? static_cast<double>((err[0] != 0) + (err[1] != 0)) : 0.0;
    mismatches.push_back(m);
    outputs.push_back(kept ? 2.0 : 0.0);
  }

  double sum_m = 0.0;
  double sum_o = 0.0;
  for (std::size_t i = 0; i < trials; ++i) {
    sum_m += mismatches[i];
    sum_o += outputs[i];
  }
  ResidualErrorEstimate est;
  est.kept_blocks = static_cast<std::size_t>(sum_o / 2.0);
  if (sum_o == 0.0) return est;
  est.rate = sum_m / sum_o;
  const double n = static_cast<double>(trials);
  const double mean_o = sum_o / n;
  double var = 0.0;
  for (std::size_t i = 0; i < trials; ++i) {
    const double r = mismatches[i] - est.rate * outputs[i];
    var += r * r;
  }
  var /= n > 1.0 ? n - 1.0 : 1.0;
  est.standard_error = std::sqrt(var / n) / mean_o;
  return est;
}

}  // namespace qkd3
