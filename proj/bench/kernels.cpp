// Serial reference vs OpenMP for each parallel kernel. Thread count follows OMP_NUM_THREADS.
#include <benchmark/benchmark.h>

#include <numeric>

#include "gibbslab/concentration.hpp"
#include "gibbslab/dobrushin.hpp"
#include "gibbslab/observables.hpp"
#include "gibbslab/sampler.hpp"
#include "gibbslab/specification.hpp"

using namespace gibbslab;

namespace {

const CompiledHamiltonian& torus_4x4() {
  static const CompiledHamiltonian h(ising_potential(2, 0.4), Window(2, 4, Geometry::Torus, 2), std::nullopt);
  return h;
}

void enumerate_parallel(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(enumerate_log_weights(torus_4x4()));
}
void enumerate_serial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(enumerate_log_weights_serial(torus_4x4()));
}

const Potential& dyson() {
  static const Potential p = dyson_truncated_potential(1, 0.3, 1.5, 6);
  return p;
}

void dobrushin_parallel(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(interdependence_row(dyson()));
}
void dobrushin_serial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(interdependence_row_serial(dyson()));
}

LocalFunction block_function() {
  return block_sum(spin_product(2, {Site{0, 0}, Site{1, 0}, Site{0, 1}}), Window(2, 3, Geometry::Free, 2));
}

void oscillation_parallel(benchmark::State& st) {
  const auto f = block_function();
  for (auto _ : st) benchmark::DoNotOptimize(oscillation_vector(f));
}
void oscillation_serial(benchmark::State& st) {
  const auto f = block_function();
  for (auto _ : st) benchmark::DoNotOptimize(oscillation_vector_serial(f));
}

std::vector<std::uint64_t> seed_set() {
  std::vector<std::uint64_t> c(64);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = (i * 2654435761u) % (std::uint64_t{1} << 20);
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  return c;
}

void hamming_parallel(benchmark::State& st) {
  const auto c = seed_set();
  for (auto _ : st) benchmark::DoNotOptimize(hamming_distance_to_set(20, 2, c));
}
void hamming_serial(benchmark::State& st) {
  const auto c = seed_set();
  for (auto _ : st) benchmark::DoNotOptimize(hamming_distance_to_set_serial(20, 2, c));
}

ChainConfig chains() {
  ChainConfig cfg(Window(2, 32, Geometry::Torus, 2), std::nullopt, ising_potential(2, 0.4));
  cfg.burnin = 100;
  cfg.samples = 200;
  cfg.chains = 4;
  return cfg;
}

void magnetization(std::span<const Symbol> s, std::span<double> out) {
  out[0] = std::accumulate(s.begin(), s.end(), 0.0);
}

void chains_parallel(benchmark::State& st) {
  const auto cfg = chains();
  for (auto _ : st) benchmark::DoNotOptimize(sample_observables(cfg, 1, magnetization));
}
void chains_serial(benchmark::State& st) {
  const auto cfg = chains();
  for (auto _ : st) benchmark::DoNotOptimize(sample_observables_serial(cfg, 1, magnetization));
}

}  // namespace

BENCHMARK(enumerate_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(enumerate_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(dobrushin_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(dobrushin_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(oscillation_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(oscillation_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(hamming_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(hamming_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(chains_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(chains_parallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
