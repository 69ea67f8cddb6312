#pragma once

// Exact complex linear algebra for a pair of qutrits: kets, product bases,
// the source state, measurement bases and Born-rule probabilities.

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

namespace qkd3 {

using Complex = std::complex<double>;

inline constexpr std::size_t kDim = 3;
inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kOrthoTolerance = 1e-10;

enum class Arm { A, B };

/// Single-qutrit vector over |0>, |1>, |2>.
struct Ket3 {
  std::array<Complex, kDim> amplitudes{};

  Complex operator[](std::size_t j) const { return amplitudes[j]; }
  double norm_squared() const;
  bool is_normalized(double tol = kNormTolerance) const;
  Ket3 normalized() const;
};

/// <u|v>, antilinear in the first argument.
Complex inner(const Ket3& u, const Ket3& v);

/// Pure state of two qutrits; amplitude (a, b) sits at index 3a + b.
/// Always normalized: the constructor rejects anything else.
class BipartiteState {
 public:
  using Amplitudes = std::array<Complex, kDim * kDim>;

  explicit BipartiteState(const Amplitudes& amplitudes);

  /// Normalizes `amplitudes` first; throws only on the zero vector.
  static BipartiteState normalize(Amplitudes amplitudes);
  static BipartiteState product(const Ket3& a, const Ket3& b);

  Complex amplitude(std::size_t a, std::size_t b) const { return amps_[kDim * a + b]; }
  const Amplitudes& amplitudes() const { return amps_; }

  /// True when the state factorizes as |u>|v>.
  bool is_product(double tol = 1e-10) const;

 private:
  Amplitudes amps_;
};

Complex inner(const BipartiteState& u, const BipartiteState& v);

/// Real, non-negative weights of the three terms of
/// alpha|0>|0> + beta|1>|2> + gamma|2>|1>.
struct StateCoefficients {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;

  static StateCoefficients maximal();
  /// Coincidence-rate estimates from the experiment; their squares sum to 1.0008.
  static StateCoefficients measured();
};

struct NormalizedCoefficients {
  StateCoefficients coefficients;
  /// Factor the raw coefficients were multiplied by.
  double applied_factor = 1.0;
};

NormalizedCoefficients normalize(const StateCoefficients& raw);

/// The source state. Renormalizes the coefficients; all-zero input throws.
BipartiteState make_state(const StateCoefficients& coeffs);

/// Exchanges B-side labels 1 and 2. Maps the source state onto sum_j |jj>.
BipartiteState relabel_b_swap12(const BipartiteState& state);

/// Three orthonormal kets; vector k is the projector for outcome k.
class MeasurementBasis {
 public:
  /// Throws ValidationError unless the vectors are orthonormal.
  explicit MeasurementBasis(const std::array<Ket3, kDim>& vectors);

  static MeasurementBasis computational();

  const Ket3& vector(std::size_t k) const { return vectors_[k]; }
  const std::array<Ket3, kDim>& vectors() const { return vectors_; }

  /// Largest deviation of the Gram matrix from the identity.
  double orthonormality_residual() const;

 private:
  std::array<Ket3, kDim> vectors_;
};

/// Same basis with components 1 and 2 of every vector exchanged. A B-side
/// basis written for sum_j |jj> becomes the matching basis for the source state.
MeasurementBasis swap12(const MeasurementBasis& basis);

/// Vector k has components exp(i 2 pi j (k + offset) / 3) / sqrt(3) on side A
/// and exp(i 2 pi j (-k + offset) / 3) / sqrt(3) on side B.
MeasurementBasis phase_basis(Arm party, double offset);

struct WeightedState {
  double weight = 0.0;
  BipartiteState state;
};

/// Convex mixture of pure states plus an isotropic part I/9.
class MixedState {
 public:
  MixedState(std::vector<WeightedState> components, double white_noise_weight);

  static MixedState pure(const BipartiteState& state);
  static MixedState white_noise();
  /// V |psi><psi| + (1 - V) I/9.
  static MixedState with_visibility(const BipartiteState& state, double visibility);

  const std::vector<WeightedState>& components() const { return components_; }
  double white_noise_weight() const { return white_; }

  /// (1 - fraction) * this + fraction * I/9.
  MixedState mixed_with_white(double fraction) const;

  /// True when every pure component is a product state.
  bool is_separable() const;

 private:
  std::vector<WeightedState> components_;
  double white_;
};

/// Component-wise relabel_b_swap12; the white part is unchanged.
MixedState relabel_b_swap12(const MixedState& state);

/// <k|_A <l|_B psi> for one pure state.
Complex projection_amplitude(const BipartiteState& state, const Ket3& a, const Ket3& b);

/// Born-rule probability of outcome k on A and l on B.
double joint_probability(const MixedState& state, const MeasurementBasis& basis_a,
                         std::size_t k, const MeasurementBasis& basis_b, std::size_t l);

/// Local unitary acting on one arm, as a 3x3 matrix (row = output index).
using Matrix3 = std::array<std::array<Complex, kDim>, kDim>;

/// Cyclic shift |j> -> |j + 1 mod 3>.
Matrix3 cyclic_shift(int power = 1);
BipartiteState apply_local(const BipartiteState& state, Arm arm, const Matrix3& op);

}  // namespace qkd3
