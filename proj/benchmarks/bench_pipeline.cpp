#include <benchmark/benchmark.h>

#include <numbers>
#include <random>

#include "thzart/fbp.hpp"
#include "thzart/forward.hpp"
#include "thzart/phantom.hpp"
#include "thzart/raytrace.hpp"
#include "thzart/recon.hpp"

using namespace thzart;

namespace {

const GridSpec kGrid{70, 141, 141, 1.0};

struct Scene {
    phantom::Phantom phantom = phantom::circle_rectangle();
    geometry::InterfaceSet interfaces = phantom.interface_set();
    MaterialField field = phantom.rasterize(kGrid);
};

const Scene& scene() {
    static const Scene s;
    return s;
}

void BM_Trace(benchmark::State& state) {
    const auto& sc = scene();
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> ang(0, 2 * std::numbers::pi);
    std::uniform_real_distribution<double> off(-70, 70);
    for (auto _ : state) benchmark::DoNotOptimize(raytrace::trace(sc.interfaces, sc.field, ang(rng), off(rng)));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Trace);

void BM_TraversePixels(benchmark::State& state) {
    const auto& sc = scene();
    const auto path = raytrace::trace(sc.interfaces, sc.field, 0.7, 12.0);
    for (auto _ : state) benchmark::DoNotOptimize(raytrace::traverse_pixels(path, kGrid));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_TraversePixels);

void BM_BuildSystemMatrix(benchmark::State& state) {
    const auto& sc = scene();
    const ScanGeometry scan{static_cast<std::size_t>(state.range(0)), 70, 70};
    recon::MatrixOptions opts;
    opts.threads = 1;
    for (auto _ : state) benchmark::DoNotOptimize(recon::build_system_matrix(sc.interfaces, sc.field, scan, opts));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(scan.ray_count()));
}
BENCHMARK(BM_BuildSystemMatrix)->Arg(90)->Arg(360)->Unit(benchmark::kMillisecond);

void BM_KaczmarzSweep(benchmark::State& state) {
    const auto& sc = scene();
    const ScanGeometry scan{360, 70, 70};
    const auto matrix = recon::build_system_matrix(sc.interfaces, sc.field, scan);
    const std::vector<double> data(scan.ray_count(), 1.0);
    const std::vector<unsigned char> usable(scan.ray_count(), 1);
    const auto order = recon::row_order(scan.ray_count(), recon::RowOrder::natural, 0);
    std::vector<double> values(kGrid.pixel_count(), 0.0);
    for (auto _ : state) {
        recon::kaczmarz_sweep(values, matrix, data, usable, 0.005, 1, order);
        benchmark::ClobberMemory();
    }
}
BENCHMARK(BM_KaczmarzSweep)->Unit(benchmark::kMillisecond);

void BM_FilteredBackprojection(benchmark::State& state) {
    const auto& sc = scene();
    const auto sino = forward::simulate(sc.field, geometry::InterfaceSet(70, {}), {360, 70, 70});
    for (auto _ : state) benchmark::DoNotOptimize(fbp::fbp_reconstruct(sino, kGrid, {}, 1));
}
BENCHMARK(BM_FilteredBackprojection)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
