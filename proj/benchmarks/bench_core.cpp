#include <benchmark/benchmark.h>

#include <random>

#include "random_configs.hpp"
#include "random_states.hpp"
#include "wwsim/collapse.hpp"
#include "wwsim/interferometer.hpp"
#include "wwsim/wavepacket.hpp"

using namespace wwsim;

namespace {

InterferometerConfig with_points(double recoil, std::size_t n) {
  auto c = wwsim::testing::balanced_config(recoil, 0.5);
  c.bs_in.packet.n_points = n;
  c.bs_out->packet.n_points = n;
  return c;
}

void BM_Shift(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto psi = gaussian(MomentumGrid::centered(0.0, 10.0, n), 0.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(shift(psi, 0.37));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Shift)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

void BM_Evolve(benchmark::State& state) {
  const auto c = with_points(1.0, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(output_probabilities(c));
}
BENCHMARK(BM_Evolve)->RangeMultiplier(4)->Range(64, 16384);

void BM_PathCoefficients(benchmark::State& state) {
  const auto c = with_points(1.0, 1024);
  for (auto _ : state) benchmark::DoNotOptimize(path_coefficients(c));
}
BENCHMARK(BM_PathCoefficients);

void BM_Visibility(benchmark::State& state) {
  const auto c = with_points(1.0, 1024);
  for (auto _ : state) benchmark::DoNotOptimize(visibility(c, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_Visibility)->Arg(36)->Arg(360)->Unit(benchmark::kMillisecond);

void BM_EvolveDense(benchmark::State& state) {
  const auto c = with_points(1.0, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(evolve_dense(c));
}
BENCHMARK(BM_EvolveDense)->Arg(16)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_PartialTrace(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto d = static_cast<std::size_t>(state.range(0));
  const Layout layout({{"a", d}, {"b", d}});
  const auto rho = wwsim::testing::random_density(rng, layout, 2);
  const std::vector<std::string> keep{"a"};
  for (auto _ : state) benchmark::DoNotOptimize(partial_trace(rho, keep));
}
BENCHMARK(BM_PartialTrace)->Arg(4)->Arg(16)->Arg(32);

void BM_SampleOutcomes(benchmark::State& state) {
  const auto psi = stern_gerlach(0.6, 0.8);
  const auto spec = stern_gerlach_spec(0.6, 0.8);
  for (auto _ : state) benchmark::DoNotOptimize(sample_outcomes(psi, spec, 100000, 42));
}
BENCHMARK(BM_SampleOutcomes)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
