#include "qkd3/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qkd3/errors.hpp"

namespace qkd3 {

double Ket3::norm_squared() const {
  double sum = 0.0;
  for (const auto& a : amplitudes) sum += std::norm(a);
  return sum;
}

bool Ket3::is_normalized(double tol) const { return std::abs(norm_squared() - 1.0) <= tol; }

Ket3 Ket3::normalized() const {
  const double n = std::sqrt(norm_squared());
  if (n == 0.0) throw ValidationError("cannot normalize the zero ket");
  Ket3 out = *this;
  for (auto& a : out.amplitudes) a /= n;
  return out;
}

Complex inner(const Ket3& u, const Ket3& v) {
  Complex sum{};
  for (std::size_t j = 0; j < kDim; ++j) sum += std::conj(u[j]) * v[j];
  return sum;
}

namespace {

double norm_squared(const BipartiteState::Amplitudes& amps) {
  double sum = 0.0;
  for (const auto& a : amps) sum += std::norm(a);
  return sum;
}

}  // namespace

BipartiteState::BipartiteState(const Amplitudes& amplitudes) : amps_(amplitudes) {
  const double n = norm_squared(amps_);
  if (!std::isfinite(n) || std::abs(n - 1.0) > kNormTolerance) {
    throw ValidationError("bipartite state is not normalized (norm^2 = " + std::to_string(n) + ")");
  }
}

BipartiteState BipartiteState::normalize(Amplitudes amplitudes) {
  const double n = std::sqrt(norm_squared(amplitudes));
  if (!(n > 0.0) || !std::isfinite(n)) throw ValidationError("invalid state: zero or non-finite amplitudes");
  for (auto& a : amplitudes) a /= n;
  return BipartiteState(amplitudes);
}

BipartiteState BipartiteState::product(const Ket3& a, const Ket3& b) {
  Amplitudes amps{};
  for (std::size_t i = 0; i < kDim; ++i)
    for (std::size_t j = 0; j < kDim; ++j) amps[kDim * i + j] = a[i] * b[j];
  return normalize(amps);
}

bool BipartiteState::is_product(double tol) const {
  // Rank one iff every 2x2 minor of the coefficient matrix vanishes.
  for (std::size_t i = 0; i < kDim; ++i)
    for (std::size_t k = i + 1; k < kDim; ++k)
      for (std::size_t j = 0; j < kDim; ++j)
        for (std::size_t l = j + 1; l < kDim; ++l) {
          const Complex minor = amplitude(i, j) * amplitude(k, l) - amplitude(i, l) * amplitude(k, j);
          if (std::abs(minor) > tol) return false;
        }
  return true;
}

Complex inner(const BipartiteState& u, const BipartiteState& v) {
  Complex sum{};
  for (std::size_t i = 0; i < kDim * kDim; ++i) sum += std::conj(u.amplitudes()[i]) * v.amplitudes()[i];
  return sum;
}

StateCoefficients StateCoefficients::maximal() {
  const double c = 1.0 / std::numbers::sqrt3;
  return {c, c, c};
}

StateCoefficients StateCoefficients::measured() { return {0.642, 0.546, 0.539}; }

NormalizedCoefficients normalize(const StateCoefficients& raw) {
  for (double c : {raw.alpha, raw.beta, raw.gamma}) {
    if (!std::isfinite(c) || c < 0.0) throw ValidationError("state coefficients must be finite and non-negative");
  }
  const double n = std::sqrt(raw.alpha * raw.alpha + raw.beta * raw.beta + raw.gamma * raw.gamma);
  if (n == 0.0) throw ValidationError("invalid state: all coefficients are zero");
  const double f = 1.0 / n;
  return {{raw.alpha * f, raw.beta * f, raw.gamma * f}, f};
}

BipartiteState make_state(const StateCoefficients& coeffs) {
  const auto c = normalize(coeffs).coefficients;
  BipartiteState::Amplitudes amps{};
  amps[kDim * 0 + 0] = c.alpha;
  amps[kDim * 1 + 2] = c.beta;
  amps[kDim * 2 + 1] = c.gamma;
  return BipartiteState::normalize(amps);
}

BipartiteState relabel_b_swap12(const BipartiteState& state) {
  static constexpr std::array<std::size_t, kDim> kPerm{0, 2, 1};
  BipartiteState::Amplitudes amps{};
  for (std::size_t a = 0; a < kDim; ++a)
    for (std::size_t b = 0; b < kDim; ++b) amps[kDim * a + kPerm[b]] = state.amplitude(a, b);
  return BipartiteState(amps);
}

MeasurementBasis::MeasurementBasis(const std::array<Ket3, kDim>& vectors) : vectors_(vectors) {
  for (const auto& v : vectors_) {
    if (!v.is_normalized()) throw ValidationError("measurement basis vector is not normalized");
  }
  if (orthonormality_residual() > kOrthoTolerance) {
    throw ValidationError("measurement basis vectors are not orthogonal");
  }
}

MeasurementBasis MeasurementBasis::computational() {
  std::array<Ket3, kDim> v{};
  for (std::size_t k = 0; k < kDim; ++k) v[k].amplitudes[k] = 1.0;
  return MeasurementBasis(v);
}

double MeasurementBasis::orthonormality_residual() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < kDim; ++i)
    for (std::size_t j = 0; j < kDim; ++j) {
      const Complex expected = i == j ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(inner(vectors_[i], vectors_[j]) - expected));
    }
  return worst;
}

MeasurementBasis swap12(const MeasurementBasis& basis) {
  std::array<Ket3, kDim> v = basis.vectors();
  for (auto& ket : v) std::swap(ket.amplitudes[1], ket.amplitudes[2]);
  return MeasurementBasis(v);
}

MeasurementBasis phase_basis(Arm party, double offset) {
  const double sign = party == Arm::A ? 1.0 : -1.0;
  const double scale = 1.0 / std::numbers::sqrt3;
  std::array<Ket3, kDim> v{};
  for (std::size_t k = 0; k < kDim; ++k)
    for (std::size_t j = 0; j < kDim; ++j) {
      const double phase = 2.0 * std::numbers::pi * static_cast<double>(j) *
                           (sign * static_cast<double>(k) + offset) / 3.0;
      v[k].amplitudes[j] = std::polar(scale, phase);
    }
  return MeasurementBasis(v);
}

MixedState::MixedState(std::vector<WeightedState> components, double white_noise_weight)
    : components_(std::move(components)), white_(white_noise_weight) {
  if (!std::isfinite(white_) || white_ < 0.0) throw ValidationError("white-noise weight must be non-negative");
  double total = white_;
  for (const auto& c : components_) {
    if (!std::isfinite(c.weight) || c.weight < 0.0) throw ValidationError("mixture weights must be non-negative");
    total += c.weight;
  }
  if (std::abs(total - 1.0) > kNormTolerance) {
    throw ValidationError("mixture weights sum to " + std::to_string(total) + ", expected 1");
  }
}

MixedState MixedState::pure(const BipartiteState& state) { return MixedState({{1.0, state}}, 0.0); }

MixedState MixedState::white_noise() { return MixedState({}, 1.0); }

MixedState MixedState::with_visibility(const BipartiteState& state, double visibility) {
  if (!(visibility >= 0.0 && visibility <= 1.0)) throw ValidationError("visibility must lie in [0, 1]");
  return MixedState({{visibility, state}}, 1.0 - visibility);
}

MixedState MixedState::mixed_with_white(double fraction) const {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw ValidationError("white-noise fraction must lie in [0, 1]");
  std::vector<WeightedState> scaled = components_;
  for (auto& c : scaled) c.weight *= 1.0 - fraction;
  return MixedState(std::move(scaled), white_ * (1.0 - fraction) + fraction);
}

bool MixedState::is_separable() const {
  return std::all_of(components_.begin(), components_.end(),
                     [](const WeightedState& c) { return c.weight == 0.0 || c.state.is_product(); });
}

Complex projection_amplitude(const BipartiteState& state, const Ket3& a, const Ket3& b) {
  Complex sum{};
  for (std::size_t i = 0; i < kDim; ++i) {
    Complex row{};
    for (std::size_t j = 0; j < kDim; ++j) row += std::conj(b[j]) * state.amplitude(i, j);
    sum += std::conj(a[i]) * row;
  }
  return sum;
}

double joint_probability(const MixedState& state, const MeasurementBasis& basis_a, std::size_t k,
                         const MeasurementBasis& basis_b, std::size_t l) {
  if (k >= kDim || l >= kDim) throw ValidationError("outcome index out of range");
  double p = state.white_noise_weight() / static_cast<double>(kDim * kDim);
  for (const auto& c : state.components()) {
    p += c.weight * std::norm(projection_amplitude(c.state, basis_a.vector(k), basis_b.vector(l)));
  }
  return p;
}

Matrix3 cyclic_shift(int power) {
  const int p = ((power % 3) + 3) % 3;
  Matrix3 m{};
  for (std::size_t j = 0; j < kDim; ++j) m[(j + static_cast<std::size_t>(p)) % kDim][j] = 1.0;
  return m;
}

BipartiteState apply_local(const BipartiteState& state, Arm arm, const Matrix3& op) {
  BipartiteState::Amplitudes out{};
  for (std::size_t a = 0; a < kDim; ++a)
    for (std::size_t b = 0; b < kDim; ++b)
      for (std::size_t m = 0; m < kDim; ++m) {
        if (arm == Arm::A) {
          out[kDim * a + b] += op[a][m] * state.amplitude(m, b);
        } else {
          out[kDim * a + b] += op[b][m] * state.amplitude(a, m);
        }
      }
  return BipartiteState::normalize(out);
}

MixedState relabel_b_swap12(const MixedState& state) {
  std::vector<WeightedState> parts;
  parts.reserve(state.components().size());
  for (const auto& c : state.components()) parts.push_back({c.weight, relabel_b_swap12(c.state)});
  return MixedState(std::move(parts), state.white_noise_weight());
}

}  // namespace qkd3
