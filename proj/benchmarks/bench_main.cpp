#include <benchmark/benchmark.h>

#include "qkd3/bell.hpp"
#include "qkd3/protocol.hpp"
#include "qkd3/reconciliation.hpp"
#include "qkd3/tritcrypt.hpp"

namespace {

using namespace qkd3;

void BM_S3Exact(benchmark::State& state) {
  const auto rho = MixedState::with_visibility(make_state(StateCoefficients::measured()), 0.93);
  const auto settings = canonical_source_settings();
  for (auto _ : state) benchmark::DoNotOptimize(s3(rho, settings));
}
BENCHMARK(BM_S3Exact);

void BM_RunSession(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto source = calibrate_noise(StateCoefficients::maximal(), 2.688, 0.093);
  const auto a = PartyConfig::standard(Arm::A);
  const auto b = PartyConfig::standard(Arm::B);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_session(n, source, EveConfig{}, a, b, ++seed));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunSession)->Arg(10000)->Arg(1000000)->Unit(benchmark::kMillisecond);

void BM_RunProtocol(benchmark::State& state) {
  const auto records = run_session(100000, SourceConfig{}, EveConfig{}, PartyConfig::standard(Arm::A),
                                   PartyConfig::standard(Arm::B), 1);
  for (auto _ : state) benchmark::DoNotOptimize(run_protocol(records));
}
BENCHMARK(BM_RunProtocol)->Unit(benchmark::kMillisecond);

void BM_OptimizePhase(benchmark::State& state) {
  const auto rho = MixedState::pure(relabel_b_swap12(make_state(StateCoefficients::measured())));
  OptimizerOptions opt;
  opt.restarts = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(optimize_s3(rho, opt));
}
BENCHMARK(BM_OptimizePhase)->Arg(1)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_OptimizeFull(benchmark::State& state) {
  const auto rho = MixedState::pure(relabel_b_swap12(make_state(StateCoefficients::measured())));
  OptimizerOptions opt;
  opt.family = SettingsFamily::FullLocalUnitary;
  opt.restarts = 1;
  opt.tolerance = 1e-6;
  for (auto _ : state) benchmark::DoNotOptimize(optimize_s3(rho, opt));
}
BENCHMARK(BM_OptimizeFull)->Unit(benchmark::kMillisecond);

void BM_ParitySift(benchmark::State& state) {
  TritString a;
  TritString b;
  RandomStream rng(3);
  for (int i = 0; i < 300000; ++i) {
    const auto t = static_cast<Trit>(rng.below(3));
    a.push_back(t);
    b.push_back(rng.bernoulli(0.1) ? static_cast<Trit>((t + 1) % 3) : t);
  }
  for (auto _ : state) benchmark::DoNotOptimize(parity_sift(a, b));
  state.SetItemsProcessed(state.iterations() * 300000);
}
BENCHMARK(BM_ParitySift)->Unit(benchmark::kMillisecond);

void BM_EncryptRoundTrip(benchmark::State& state) {
  const auto code = encode("THE RESULT IS FORTY TWO");
  const auto key = TritString::parse(std::string(code.size(), '1'));
  for (auto _ : state) benchmark::DoNotOptimize(decode(decrypt(encrypt(code, key), key)));
}
BENCHMARK(BM_EncryptRoundTrip);

}  // namespace

BENCHMARK_MAIN();
