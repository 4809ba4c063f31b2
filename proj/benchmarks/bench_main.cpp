#include <benchmark/benchmark.h>

#include <vector>

#include "projwass/datasets.hpp"
#include "projwass/mmd.hpp"
#include "projwass/potential.hpp"
#include "projwass/pw.hpp"
#include "projwass/transport1d.hpp"

namespace {

using namespace projwass;

SampleSet blob(DatasetRole role, std::size_t n, std::uint64_t seed) {
  DatasetSpec s;
  s.role = role;
  return generate(s, n, RngSeed{seed});
}

SampleSet laplace(DatasetRole role, std::size_t n, std::size_t d, std::uint64_t seed) {
  DatasetSpec s;
  s.family = DatasetFamily::kLaplaceShift;
  s.role = role;
  s.d = d;
  return generate(s, n, RngSeed{seed});
}

void BM_W1OneDim(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto m = static_cast<std::size_t>(state.range(1));
  const std::vector<double> u = laplace(DatasetRole::kMu, n, 1, 1).column(0);
  const std::vector<double> v = laplace(DatasetRole::kNu, m, 1, 2).column(0);
  for (auto _ : state) benchmark::DoNotOptimize(w1_1d(u, v).cost);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_W1OneDim)->Args({1000, 1000})->Args({1000, 1500})->Args({100000, 100000})->Complexity();

void BM_CTransform(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const SampleSet y = blob(DatasetRole::kNu, m, 3);
  const PotentialNetwork net = init_network(default_network_dims(1), Activation::kRelu, RngSeed{4});
  const ProjectionMatrix a = orthonormalize(Matrix::Ones(2, 1));
  const Vector x = Vector::Zero(2);
  for (auto _ : state) benchmark::DoNotOptimize(c_transform(net, a, x, y).value);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CTransform)->Range(64, 4096)->Complexity();

void BM_EstimatePwBlob(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const SampleSet x = blob(DatasetRole::kMu, n, 5);
  const SampleSet y = blob(DatasetRole::kNu, n, 6);
  PwConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(estimate_pw(x, y, cfg).value);
}
BENCHMARK(BM_EstimatePwBlob)->Arg(200)->Arg(1600)->Unit(benchmark::kMillisecond);

void BM_EstimatePwHighDim(benchmark::State& state) {
  const SampleSet x = laplace(DatasetRole::kMu, 200, 400, 7);
  const SampleSet y = laplace(DatasetRole::kNu, 200, 400, 8);
  const PwConfig cfg = power_study_pw_config();
  for (auto _ : state) benchmark::DoNotOptimize(estimate_pw(x, y, cfg).value);
}
BENCHMARK(BM_EstimatePwHighDim)->Unit(benchmark::kMillisecond);

void BM_MmdBiased(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const SampleSet x = laplace(DatasetRole::kMu, n, 400, 9);
  const SampleSet y = laplace(DatasetRole::kNu, n, 400, 10);
  for (auto _ : state) benchmark::DoNotOptimize(mmd_biased(x, y, MmdConfig{}));
}
BENCHMARK(BM_MmdBiased)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
