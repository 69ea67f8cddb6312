#include "qkd3/bell.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "qkd3/errors.hpp"
#include "qkd3/rng.hpp"

namespace qkd3 {

ProbabilityTable outcome_distribution(const MixedState& state, const MeasurementBasis& basis_a,
                                      const MeasurementBasis& basis_b) {
  ProbabilityTable t{};
  for (std::size_t k = 0; k < kDim; ++k)
    for (std::size_t l = 0; l < kDim; ++l) t[k][l] = joint_probability(state, basis_a, k, basis_b, l);
  return t;
}

double coincidence_mod3(const ProbabilityTable& table, int k) {
  const auto shift = static_cast<std::size_t>(((k % 3) + 3) % 3);
  double sum = 0.0;
  for (std::size_t j = 0; j < kDim; ++j) sum += table[j][(j + shift) % kDim];
  return sum;
}

int s3_coefficient(int a, int b, int k) {
  // Rows: (a, b); columns: k = 0, 1, 2.
  //   +P(A1=B1)    -P(A1=B1-1)
  //   +P(A1=B2)    -P(A1=B2+1)
  //   -P(A2=B1)    +P(A2=B1-1)
  //   +P(A2=B2)    -P(A2=B2-1)
  static constexpr int kTable[2][2][3] = {
      {{+1, 0, -1}, {+1, -1, 0}},
      {{-1, 0, +1}, {+1, 0, -1}},
  };
  if (a < 1 || a > 2 || b < 1 || b > 2 || k < 0 || k > 2) throw ValidationError("s3 coefficient index out of range");
  return kTable[a - 1][b - 1][k];
}

CorrelationProfile correlation_profile(const MixedState& state, const SettingsPair& settings) {
  CorrelationProfile profile;
  for (int a = 1; a <= 2; ++a)
    for (int b = 1; b <= 2; ++b) {
      const auto table = outcome_distribution(state, settings.a(a), settings.b(b));
      for (int k = 0; k < 3; ++k) profile.p[a - 1][b - 1][k] = coincidence_mod3(table, k);
    }
  return profile;
}

double s3_from_profile(const CorrelationProfile& profile) {
  double s = 0.0;
  for (int a = 1; a <= 2; ++a)
    for (int b = 1; b <= 2; ++b)
      for (int k = 0; k < 3; ++k) s += s3_coefficient(a, b, k) * profile.p[a - 1][b - 1][k];
  return s;
}

BellValue s3(const MixedState& state, const SettingsPair& settings) {
  return {s3_from_profile(correlation_profile(state, settings))};
}

SettingsPair canonical_settings() {
  return {phase_basis(Arm::A, 0.0), phase_basis(Arm::A, -0.5), phase_basis(Arm::B, -0.25),
          phase_basis(Arm::B, 0.25)};
}

SettingsPair relabel_b_swap12(const SettingsPair& settings) {
  return {settings.a1, settings.a2, swap12(settings.b1), swap12(settings.b2)};
}

SettingsPair canonical_source_settings() { return relabel_b_swap12(canonical_settings()); }

double s3_vs_visibility(double visibility) {
  if (!(visibility >= 0.0 && visibility <= 1.0)) throw ValidationError("visibility must lie in [0, 1]");
  return visibility * kQuantumMax;
}

double visibility_threshold() { return kClassicalBound / kQuantumMax; }

namespace {

using Matrix = Matrix3;

Matrix multiply(const Matrix& x, const Matrix& y) {
  Matrix out{};
  for (std::size_t i = 0; i < kDim; ++i)
    for (std::size_t j = 0; j < kDim; ++j)
      for (std::size_t m = 0; m < kDim; ++m) out[i][j] += x[i][m] * y[m][j];
  return out;
}

Matrix givens(std::size_t i, std::size_t j, double theta, double delta) {
  Matrix g{};
  for (std::size_t d = 0; d < kDim; ++d) g[d][d] = 1.0;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  g[i][i] = c;
  g[j][j] = c;
  g[i][j] = -std::polar(s, -delta);
  g[j][i] = std::polar(s, delta);
  return g;
}

}  // namespace

MeasurementBasis unitary_basis(const std::array<double, 8>& p) {
  Matrix d{};
  d[0][0] = std::polar(1.0, p[0]);
  d[1][1] = std::polar(1.0, p[1]);
  d[2][2] = 1.0;
  const Matrix u = multiply(multiply(multiply(d, givens(1, 2, p[2], p[3])), givens(0, 2, p[4], p[5])),
                            givens(0, 1, p[6], p[7]));
  std::array<Ket3, kDim> v{};
  for (std::size_t k = 0; k < kDim; ++k) {
    for (std::size_t j = 0; j < kDim; ++j) v[k].amplitudes[j] = u[j][k];
    v[k] = v[k].normalized();
  }
  return MeasurementBasis(v);
}

std::size_t parameter_count(SettingsFamily family) { return family == SettingsFamily::PhaseOnly ? 4 : 32; }

SettingsPair settings_from_parameters(SettingsFamily family, const std::vector<double>& params) {
  if (params.size() < parameter_count(family)) throw ValidationError("too few settings parameters");
  if (family == SettingsFamily::PhaseOnly) {
    return {phase_basis(Arm::A, params[0]), phase_basis(Arm::A, params[1]), phase_basis(Arm::B, params[2]),
            phase_basis(Arm::B, params[3])};
  }
  auto basis = [&](std::size_t which) {
    std::array<double, 8> p{};
    for (std::size_t i = 0; i < 8; ++i) p[i] = params[8 * which + i];
    return unitary_basis(p);
  };
  return {basis(0), basis(1), basis(2), basis(3)};
}

namespace {

using Objective = std::function<double(const std::vector<double>&)>;

struct MinimizerDeleter {
  void operator()(gsl_multimin_fminimizer* m) const { gsl_multimin_fminimizer_free(m); }
};
struct VectorDeleter {
  void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};

double gsl_trampoline(const gsl_vector* x, void* params) {
  const auto& objective = *static_cast<const Objective*>(params);
  std::vector<double> v(x->size);
  for (std::size_t i = 0; i < x->size; ++i) v[i] = gsl_vector_get(x, i);
  return objective(v);
}

struct LocalResult {
  std::vector<double> x;
  double value = 0.0;
  bool converged = false;
};

LocalResult minimize_from(const Objective& objective, const std::vector<double>& start, double step,
                          double tolerance, int max_iterations) {
  const std::size_t n = start.size();
  std::unique_ptr<gsl_vector, VectorDeleter> x(gsl_vector_alloc(n));
  std::unique_ptr<gsl_vector, VectorDeleter> steps(gsl_vector_alloc(n));
  for (std::size_t i = 0; i < n; ++i) gsl_vector_set(x.get(), i, start[i]);
  gsl_vector_set_all(steps.get(), step);

  gsl_multimin_function fn;
  fn.n = n;
  fn.f = &gsl_trampoline;
  fn.params = const_cast<Objective*>(&objective);

  std::unique_ptr<gsl_multimin_fminimizer, MinimizerDeleter> m(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n));
  gsl_multimin_fminimizer_set(m.get(), &fn, x.get(), steps.get());

  LocalResult result;
  for (int iter = 0; iter < max_iterations; ++iter) {
    if (gsl_multimin_fminimizer_iterate(m.get()) != GSL_SUCCESS) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(m.get()), tolerance) == GSL_SUCCESS) {
      result.converged = true;
      break;
    }
  }
  result.x.resize(n);
  for (std::size_t i = 0; i < n; ++i) result.x[i] = gsl_vector_get(m->x, i);
  result.value = m->fval;
  return result;
}

struct SearchResult {
  LocalResult best;
  int best_restart = 0;
  bool any_converged = false;
};

// Restarts run in order and the first strictly best value wins.
SearchResult multi_start(const Objective& objective, std::size_t dim, double half_width, double step,
                         const OptimizerOptions& options) {
  if (!(options.tolerance > 0.0)) throw ValidationError("optimizer tolerance must be positive");
  if (options.restarts < 1) throw ValidationError("optimizer needs at least one restart");
  gsl_set_error_handler_off();

  SearchResult search;
  bool have_best = false;
  for (int r = 0; r < options.restarts; ++r) {
    RandomStream rng(options.seed, static_cast<std::uint64_t>(r));
    // Start from the best of a batch of random candidates.
    std::vector<double> start(dim);
    std::vector<double> candidate(dim);
    double start_value = 0.0;
    for (int c = 0; c < std::max(1, options.screen_samples); ++c) {
      for (auto& s : candidate) s = rng.uniform(-half_width, half_width);
      const double v = objective(candidate);
      if (c == 0 || v < start_value) {
        start_value = v;
        start = candidate;
      }
    }
    auto local = minimize_from(objective, start, step, options.tolerance, options.max_iterations);
    // A fresh simplex around the first answer unsticks collapsed simplices.
    auto polished = minimize_from(objective, local.x, 0.25 * step, options.tolerance, options.max_iterations);
    if (polished.value <= local.value) {
      polished.converged = polished.converged || local.converged;
      local = std::move(polished);
    }
    search.any_converged = search.any_converged || local.converged;
    if (!have_best || local.value < search.best.value) {
      search.best = std::move(local);
      search.best_restart = r;
      have_best = true;
    }
  }
  return search;
}

double family_half_width(SettingsFamily family) {
  return family == SettingsFamily::PhaseOnly ? 1.0 : std::numbers::pi;
}

double family_step(const OptimizerOptions& options) {
  if (options.initial_step > 0.0) return options.initial_step;
  return options.family == SettingsFamily::PhaseOnly ? 0.25 : 0.5;
}

}  // namespace

OptimizationResult optimize_s3(const MixedState& state, const OptimizerOptions& options) {
  const Objective objective = [&](const std::vector<double>& x) {
    return -s3(state, settings_from_parameters(options.family, x)).s3;
  };
  const auto search = multi_start(objective, parameter_count(options.family), family_half_width(options.family),
                                  family_step(options), options);
  auto settings = settings_from_parameters(options.family, search.best.x);
  const double value = s3(state, settings).s3;
  return {std::move(settings), value, search.best.x, search.any_converged, search.best_restart, 0.0};
}

OptimizationResult optimize_s3_with_state(const std::function<MixedState(double)>& state_family, double lo,
                                          double hi, const OptimizerOptions& options) {
  if (!(hi > lo)) throw ValidationError("state parameter range is empty");
  const std::size_t n = parameter_count(options.family);
  // The last coordinate t maps smoothly onto [lo, hi].
  const auto to_range = [lo, hi](double t) { return lo + (hi - lo) * 0.5 * (1.0 + std::sin(t)); };
  const Objective objective = [&](const std::vector<double>& x) {
    const std::vector<double> settings_params(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n));
    return -s3(state_family(to_range(x[n])), settings_from_parameters(options.family, settings_params)).s3;
  };
  const auto search = multi_start(objective, n + 1, family_half_width(options.family),
                                  family_step(options), options);
  const std::vector<double> settings_params(search.best.x.begin(),
                                            search.best.x.begin() + static_cast<std::ptrdiff_t>(n));
  const double parameter = to_range(search.best.x[n]);
  auto settings = settings_from_parameters(options.family, settings_params);
  const double value = s3(state_family(parameter), settings).s3;
  return {std::move(settings), value, search.best.x, search.any_converged, search.best_restart, parameter};
}

BipartiteState asymmetric_state(double g) {
  BipartiteState::Amplitudes amps{};
  amps[0] = 1.0;
  amps[4] = g;
  amps[8] = 1.0;
  return BipartiteState::normalize(amps);
}

}  // namespace qkd3
