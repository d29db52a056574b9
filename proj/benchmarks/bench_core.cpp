#include <benchmark/benchmark.h>

#include "permalign/assignment.hpp"
#include "permalign/matching.hpp"
#include "permalign/network.hpp"
#include "permalign/rng.hpp"
#include "permalign/sampling.hpp"
#include "permalign/spectra.hpp"

using namespace permalign;

namespace {

Matrix gaussian_cloud(std::size_t m, std::size_t n, std::uint64_t seed) {
  RngState rng(seed);
  return gaussian_rows(m, CovarianceSpec::isotropic(n, 1.0), rng);
}

void SolveLap(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const Matrix x = gaussian_cloud(n, 2, 1);
  const Matrix y = gaussian_cloud(n, 2, 2);
  const CostMatrix cost = pairwise_sq_dist(x, y);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_lap(cost).cost);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(SolveLap)->RangeMultiplier(2)->Range(64, 2048)->Complexity()
    ->Unit(benchmark::kMillisecond);

void PairwiseSqDist(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const Matrix x = gaussian_cloud(n, 16, 3);
  const Matrix y = gaussian_cloud(n, 16, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(pairwise_sq_dist(x, y));
  }
}
BENCHMARK(PairwiseSqDist)->RangeMultiplier(4)->Range(64, 1024)
    ->Unit(benchmark::kMillisecond);

void JacobiEig(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const Matrix z = gaussian_cloud(n, 2 * n, 5);
  const Matrix s = second_moment(z);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sym_eig(s).values);
  }
}
BENCHMARK(JacobiEig)->RangeMultiplier(2)->Range(16, 256)->Unit(benchmark::kMillisecond);

void ForwardBackward(benchmark::State& state) {
  const std::size_t width = static_cast<std::size_t>(state.range(0));
  Architecture arch;
  arch.dims = {64, width, width, 10};
  RngState rng(6);
  const MlpWeights w = init_weights(arch, InitSpec::gaussian_iid(), rng);
  Batch batch;
  batch.x = Matrix(64, 128);
  for (double& v : batch.x.data()) v = rng.next_uniform(-1.0, 1.0);
  batch.labels.assign(128, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(loss_and_grad(arch, w, batch, LossKind::cross_entropy).loss);
  }
}
BENCHMARK(ForwardBackward)->RangeMultiplier(2)->Range(64, 512)
    ->Unit(benchmark::kMillisecond);

void MatchNaive(benchmark::State& state) {
  const std::size_t width = static_cast<std::size_t>(state.range(0));
  Architecture arch;
  arch.dims = {32, width, 1};
  RngState ra(7), rb(8);
  const MlpWeights a = init_weights(arch, InitSpec::gaussian_iid(), ra);
  const MlpWeights b = init_weights(arch, InitSpec::gaussian_iid(), rb);
  for (auto _ : state) {
    benchmark::DoNotOptimize(match_layers(arch, a, b, MatchMethod::naive()).layers);
  }
}
BENCHMARK(MatchNaive)->RangeMultiplier(4)->Range(64, 1024)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
