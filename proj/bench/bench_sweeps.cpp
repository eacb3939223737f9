// Serial reference loops against the OpenMP kernels on the r_j = j + 1
// staircase.

#include <benchmark/benchmark.h>

#include "staircase/analysis.hpp"

namespace sc = staircase;

namespace {

sc::StageTable affine_table(int depth) {
  sc::ConstructionParams params;
  params.cuts = sc::AffineCuts{1, 1};
  return sc::build_stage_table(params, depth);
}

const sc::LevelSet kBase{2, {0}};

sc::SweepSampling window(int stage) {
  sc::SweepSampling s;
  s.windows = {sc::StageWindow{stage}};
  s.samples = 16;
  s.seed = 7;
  return s;
}

void BM_SweepSerial(benchmark::State& state) {
  auto table = affine_table(8);
  const auto mode = sc::NormalizationMode::probability(table.stage(8).total);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sc::mixing_sweep_serial(table, kBase, kBase, window(static_cast<int>(state.range(0))), mode, {1, 1 << 20}));
  }
}

void BM_SweepParallel(benchmark::State& state) {
  auto table = affine_table(8);
  const auto mode = sc::NormalizationMode::probability(table.stage(8).total);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sc::mixing_sweep(table, kBase, kBase, window(static_cast<int>(state.range(0))), mode, {1, 1 << 20}, 0));
  }
}

void BM_DensitySerial(benchmark::State& state) {
  auto table = affine_table(5);
  const auto mode = sc::NormalizationMode::probability(table.stage(5).total);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sc::good_delay_density_serial(table, kBase, 17, 17 + state.range(0), 3, {1, 20}, mode,
                                                           {1, 1 << 20}));
  }
}

void BM_DensityParallel(benchmark::State& state) {
  auto table = affine_table(5);
  const auto mode = sc::NormalizationMode::probability(table.stage(5).total);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sc::good_delay_density(table, kBase, 17, 17 + state.range(0), 3, {1, 20}, mode, {1, 1 << 20}, 0));
  }
}

}  // namespace

BENCHMARK(BM_SweepSerial)->Arg(5)->Arg(6)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Arg(5)->Arg(6)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DensitySerial)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DensityParallel)->Arg(50)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
