#pragma once

// Random inputs for property tests. Bases are built by Gram-Schmidt here,
// independently of the library's own basis constructors.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "qkd3/linalg.hpp"
#include "qkd3/trits.hpp"

namespace qkd3::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : eng_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(eng_); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(eng_); }
  Complex complex_normal() { return {normal(), normal()}; }

  Ket3 ket() {
    Ket3 k;
    for (auto& a : k.amplitudes) a = complex_normal();
    return k.normalized();
  }

  MeasurementBasis basis() {
    std::array<Ket3, kDim> v;
    for (std::size_t i = 0; i < kDim; ++i) {
      Ket3 w = ket();
      for (std::size_t j = 0; j < i; ++j) {
        Complex proj{};
        for (std::size_t c = 0; c < kDim; ++c) proj += std::conj(v[j].amplitudes[c]) * w.amplitudes[c];
        for (std::size_t c = 0; c < kDim; ++c) w.amplitudes[c] -= proj * v[j].amplitudes[c];
      }
      v[i] = w.normalized();
    }
    return MeasurementBasis(v);
  }

  BipartiteState state() {
    BipartiteState::Amplitudes a{};
    for (auto& x : a) x = complex_normal();
    return BipartiteState::normalize(a);
  }

  BipartiteState product_state() { return BipartiteState::product(ket(), ket()); }

  /// Up to `max_components` random pure parts plus a random white weight.
  MixedState mixture(std::size_t max_components = 3, bool separable = false) {
    const std::size_t n = 1 + index(max_components);
    std::vector<double> w(n + 1);
    double total = 0.0;
    for (auto& x : w) total += (x = uniform(0.01, 1.0));
    std::vector<WeightedState> parts;
    double used = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double wi = w[i] / total;
      used += wi;
      parts.push_back({wi, separable ? product_state() : state()});
    }
    return MixedState(std::move(parts), 1.0 - used);
  }

  TritString trits(std::size_t n) {
    std::vector<Trit> t(n);
    for (auto& x : t) x = static_cast<Trit>(index(3));
    return TritString(std::move(t));
  }

 private:
  std::mt19937_64 eng_;
};

/// <k|_A <l|_B psi> through the explicit 9-dimensional product vector.
inline Complex naive_amplitude(const BipartiteState& psi, const Ket3& a, const Ket3& b) {
  std::array<Complex, 9> product{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) product[3 * i + j] = a.amplitudes[i] * b.amplitudes[j];
  Complex sum{};
  for (std::size_t n = 0; n < 9; ++n) sum += std::conj(product[n]) * psi.amplitudes()[n];
  return sum;
}

inline double naive_probability(const MixedState& rho, const MeasurementBasis& ba, std::size_t k,
                                const MeasurementBasis& bb, std::size_t l) {
  double p = rho.white_noise_weight() / 9.0;
  for (const auto& c : rho.components()) p += c.weight * std::norm(naive_amplitude(c.state, ba.vector(k), bb.vector(l)));
  return p;
}

/// Upper 0.999 quantiles of chi-square for 1..8 degrees of freedom.
inline constexpr std::array<double, 9> kChiSquare999{0.0,    10.828, 13.816, 16.266, 18.467,
                                                     20.515, 22.458, 24.322, 26.124};

}  // namespace qkd3::testing
