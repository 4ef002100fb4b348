#include "jspec/cauchy.hpp"
#include "jspec/spectra.hpp"

#include <benchmark/benchmark.h>

#include <array>
#include <map>

using namespace jspec;

namespace {

const TridiagonalTable& hermite_table(index_t n) {
    static std::map<index_t, TridiagonalTable> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, make_table(builtin_family("hermite"), n)).first;
    return it->second;
}

void BM_SturmScalar8(benchmark::State& state) {
    const TridiagonalTable& t = hermite_table(state.range(0));
    std::array<double, 8> xs{-3, -2, -1, -0.5, 0.5, 1, 2, 3};
    for (auto _ : state)
        for (double x : xs) benchmark::DoNotOptimize(sturm_count(t, x).count);
    state.SetItemsProcessed(state.iterations() * 8 * state.range(0));
}

void BM_SturmBatch8(benchmark::State& state) {
    const TridiagonalTable& t = hermite_table(state.range(0));
    std::array<double, 8> xs{-3, -2, -1, -0.5, 0.5, 1, 2, 3};
    std::array<index_t, 8> counts{};
    for (auto _ : state) {
        sturm_count_batch(t, xs.data(), counts.data(), 8);
        benchmark::DoNotOptimize(counts);
    }
    state.SetItemsProcessed(state.iterations() * 8 * state.range(0));
}

void BM_BisectSerial(benchmark::State& state) {
    const TridiagonalTable& t = hermite_table(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(bisect_eigenvalues_serial(t, 1e-12));
}

void BM_BisectBatched(benchmark::State& state) {
    const TridiagonalTable& t = hermite_table(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(bisect_eigenvalues(t, 1e-12));
}

void BM_CountInterval(benchmark::State& state) {
    const JacobiFamily f = builtin_family("hermite");
    for (auto _ : state) benchmark::DoNotOptimize(count_in_interval(f, {-1.0, 1.0, state.range(0)}));
}

void BM_CauchyLogDeriv(benchmark::State& state) {
    const JacobiFamily f = builtin_family("hermite");
    for (auto _ : state) benchmark::DoNotOptimize(cauchy_via_logderiv(f, state.range(0), cplx(0, 1)));
}

}  // namespace

BENCHMARK(BM_SturmScalar8)->Arg(1 << 12)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_SturmBatch8)->Arg(1 << 12)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_BisectSerial)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BisectBatched)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CountInterval)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CauchyLogDeriv)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
