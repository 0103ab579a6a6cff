#include <benchmark/benchmark.h>

#include "pssr/operators.hpp"
#include "pssr/photometry.hpp"
#include "pssr/solver.hpp"
#include "pssr/synth.hpp"

using namespace pssr;

namespace {

Dataset bench_dataset(int n)
{
    SurfaceParams sp;
    const ScalarGrid z = make_surface(SurfaceKind::gaussian_bumps, sp, 160, 120);
    const ColorGrid rho = make_albedo(AlbedoKind::checker, AlbedoParams{}, 160, 120);
    const CameraIntrinsics cam{200.0, 80.0, 60.0};
    return generate_dataset(z, rho, sample_lighting(n, 0), cam, 2,
                            NoiseParams{0.01, 1e-4, 0});
}

void BM_NormalsFromDepth(benchmark::State& state)
{
    const Dataset d = bench_dataset(4);
    for (auto _ : state)
        benchmark::DoNotOptimize(normals_from_depth(d.ground_truth->depth, d.intrinsics));
}
BENCHMARK(BM_NormalsFromDepth);

void BM_Render(benchmark::State& state)
{
    const Dataset d = bench_dataset(4);
    for (auto _ : state)
        benchmark::DoNotOptimize(render(d.ground_truth->depth, d.ground_truth->albedo,
                                        d.ground_truth->lighting[0], d.intrinsics));
}
BENCHMARK(BM_Render);

void BM_Downsample(benchmark::State& state)
{
    const Dataset d = bench_dataset(4);
    const DownsampleKernel k(160, 120, 2);
    for (auto _ : state)
        benchmark::DoNotOptimize(downsample(d.ground_truth->depth, k));
}
BENCHMARK(BM_Downsample);

void BM_InitDepth(benchmark::State& state)
{
    const Dataset d = bench_dataset(8);
    for (auto _ : state)
        benchmark::DoNotOptimize(init_depth(d.depths, d.scale_factor));
}
BENCHMARK(BM_InitDepth);

void BM_LightingUpdate(benchmark::State& state)
{
    const Dataset d = bench_dataset(static_cast<int>(state.range(0)));
    const ScalarGrid z = init_depth(d.depths, d.scale_factor);
    const ColorGrid rho(z.width(), z.height(), {1, 1, 1});
    for (auto _ : state)
        benchmark::DoNotOptimize(update_lighting(d.images, z, rho, d.intrinsics));
}
BENCHMARK(BM_LightingUpdate)->Arg(8)->Arg(16)->Arg(32);

void BM_DepthStep(benchmark::State& state)
{
    const Dataset d = bench_dataset(static_cast<int>(state.range(0)));
    const ScalarGrid z = init_depth(d.depths, d.scale_factor);
    const ColorGrid rho(z.width(), z.height(), {1, 1, 1});
    const auto lights = update_lighting(d.images, z, rho, d.intrinsics);
    SolverConfig cfg;
    for (auto _ : state)
        benchmark::DoNotOptimize(update_depth(d, z, rho, lights, cfg));
}
BENCHMARK(BM_DepthStep)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_SolveSmall(benchmark::State& state)
{
    SurfaceParams sp;
    const ScalarGrid z = make_surface(SurfaceKind::gaussian_bumps, sp, 64, 48);
    const ColorGrid rho = make_albedo(AlbedoKind::checker, AlbedoParams{}, 64, 48);
    const CameraIntrinsics cam{80.0, 32.0, 24.0};
    const Dataset d = generate_dataset(z, rho, sample_lighting(8, 0), cam, 2,
                                       NoiseParams{0.01, 1e-4, 0});
    SolverConfig cfg;
    for (auto _ : state)
        benchmark::DoNotOptimize(solve(d, cfg));
}
BENCHMARK(BM_SolveSmall)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
