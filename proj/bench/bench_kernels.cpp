#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "weakrig/henneberg.hpp"
#include "weakrig/kernels.hpp"

namespace {

using namespace weakrig;

std::vector<Framework> grown_frameworks(int count, int steps) {
  std::vector<Framework> out;
  for (int s = 0; s < count; ++s)
    out.push_back(grow_random(triangle_seed(), steps, static_cast<std::uint64_t>(s)).frameworks.back());
  return out;
}

void BM_ClassifyBatchSerial(benchmark::State& state) {
  const auto fws = grown_frameworks(64, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(serial::classify_batch(fws));
}

void BM_ClassifyBatchParallel(benchmark::State& state) {
  const auto fws = grown_frameworks(64, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(classify_batch(fws));
}

void jacobian_case(benchmark::State& state, bool parallel) {
  const Framework f = grow_random(triangle_seed(), static_cast<int>(state.range(0)), 1).frameworks.back();
  const VectorMap fn = [&](const Eigen::VectorXd& x) {
    return detail::weak_rigidity_function(f.graph(), x, 2);
  };
  for (auto _ : state) {
    benchmark::DoNotOptimize(parallel ? central_difference_jacobian(fn, f.positions(), 1e-6)
                                      : serial::central_difference_jacobian(fn, f.positions(), 1e-6));
  }
}

void BM_JacobianSerial(benchmark::State& state) { jacobian_case(state, false); }
void BM_JacobianParallel(benchmark::State& state) { jacobian_case(state, true); }

std::vector<SimulationJob> simulation_jobs() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3, 3);
  const Graph g = build_graph(3, {{0, 1}, {0, 2}}, {{0, 1, 2}});
  const Framework target = Framework::planar(g, {{0, 0}, {2, 0}, {1, 2}});
  std::vector<SimulationJob> jobs;
  for (int k = 0; k < 16; ++k) {
    const Framework f = Framework::planar(g, {{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}});
    jobs.push_back({f, targets_from(target)});
  }
  return jobs;
}

void BM_SimulateBatchSerial(benchmark::State& state) {
  const auto jobs = simulation_jobs();
  SimulationConfig cfg;
  cfg.t_max = 5.0;
  for (auto _ : state) benchmark::DoNotOptimize(serial::simulate_batch(jobs, cfg));
}

void BM_SimulateBatchParallel(benchmark::State& state) {
  const auto jobs = simulation_jobs();
  SimulationConfig cfg;
  cfg.t_max = 5.0;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_batch(jobs, cfg));
}

std::vector<GrowthJob> growth_jobs() {
  std::vector<GrowthJob> jobs;
  for (std::uint64_t s = 0; s < 32; ++s) jobs.push_back({7, s, 0.5});
  return jobs;
}

void BM_GrowBatchSerial(benchmark::State& state) {
  const auto jobs = growth_jobs();
  for (auto _ : state) benchmark::DoNotOptimize(serial::grow_batch(triangle_seed(), jobs));
}

void BM_GrowBatchParallel(benchmark::State& state) {
  const auto jobs = growth_jobs();
  for (auto _ : state) benchmark::DoNotOptimize(grow_batch(triangle_seed(), jobs));
}

}  // namespace

BENCHMARK(BM_ClassifyBatchSerial)->Arg(7)->Arg(27);
BENCHMARK(BM_ClassifyBatchParallel)->Arg(7)->Arg(27);
BENCHMARK(BM_JacobianSerial)->Arg(7)->Arg(47);
BENCHMARK(BM_JacobianParallel)->Arg(7)->Arg(47);
BENCHMARK(BM_SimulateBatchSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulateBatchParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GrowBatchSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GrowBatchParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
