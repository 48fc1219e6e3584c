#include <benchmark/benchmark.h>

#include "nvsim/analysis.hpp"
#include "nvsim/fdtd.hpp"
#include "nvsim/oracles.hpp"
#include "nvsim/rng.hpp"
#include "nvsim/scene.hpp"
#include "nvsim/voxelize.hpp"

using namespace nvsim;

static void BM_Voxelize(benchmark::State& state) {
    const DielectricScene scene = build_scene(PresetId::Coverslip);
    for (auto _ : state) benchmark::DoNotOptimize(voxelize(scene, 5.0));
}
BENCHMARK(BM_Voxelize)->Unit(benchmark::kMillisecond);

static void BM_VoxelizeOpal(benchmark::State& state) {
    const DielectricScene scene = build_scene(PresetId::OpalInterstitial);
    for (auto _ : state) benchmark::DoNotOptimize(voxelize(scene, 5.0));
}
BENCHMARK(BM_VoxelizeOpal)->Unit(benchmark::kMillisecond);

static void BM_SphereSeries(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(
            chew_rate({27.0, 2.4, 1.0, 16.2, SphereOrientation::Tangential, 680.0}));
}
BENCHMARK(BM_SphereSeries);

static void BM_InterfaceIntegral(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(
            interface_rate({100.0, 1.0, 1.45, InterfaceOrientation::Perpendicular, 680.0}));
}
BENCHMARK(BM_InterfaceIntegral);

// Two full optical cycles on a small vacuum grid; tracks stepping throughput.
static void BM_SolverCycles(benchmark::State& state) {
    const VoxelGrid grid = VoxelGrid::uniform(30, 5.0, 1.0);
    SolverConfig cfg;
    cfg.warmup_cycles = 1;
    cfg.max_cycles = 2;
    cfg.measure_cycles = 1;
    for (auto _ : state)
        benchmark::DoNotOptimize(radiated_power(grid, {{0, 0, 0}, {0, 0, 1}}, cfg));
}
BENCHMARK(BM_SolverCycles)->Unit(benchmark::kMillisecond);

static void BM_KsTwoSample(benchmark::State& state) {
    CounterRng rng(1, 0);
    std::vector<double> x, y;
    for (int i = 0; i < 1000; ++i) x.push_back(rng.next_double());
    for (int i = 0; i < 1000; ++i) y.push_back(rng.next_double());
    for (auto _ : state) benchmark::DoNotOptimize(ks_two_sample(x, y));
}
BENCHMARK(BM_KsTwoSample);

BENCHMARK_MAIN();
