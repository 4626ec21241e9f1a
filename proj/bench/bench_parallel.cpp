// Serial reference vs OpenMP kernels. Pass --benchmark_filter to narrow the run.

#include "kvstar/graphs.hpp"
#include "kvstar/weights.hpp"

#include <benchmark/benchmark.h>

#include <omp.h>

using namespace kvstar;

namespace {

AdmissibleGraph const& bench_graph()
{
    static auto g = parse_graph("2 2 ; 0:(1,g0) 1:(g0,g1)");
    return g;
}

void BM_McWeightSerial(benchmark::State& state)
{
    McOptions o{static_cast<std::uint64_t>(state.range(0)), 1, 1};
    for (auto _ : state)
        benchmark::DoNotOptimize(mc_weight_serial(bench_graph(), o).mean);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_McWeightParallel(benchmark::State& state)
{
    McOptions o{static_cast<std::uint64_t>(state.range(0)), 1, static_cast<unsigned>(omp_get_max_threads())};
    for (auto _ : state)
        benchmark::DoNotOptimize(mc_weight(bench_graph(), o).mean);
    state.SetItemsProcessed(state.iterations() * state.range(0));
    state.counters["workers"] = o.workers;
}

void BM_EnumerateSerial(benchmark::State& state)
{
    auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(enumerate_graphs_serial(n, 2, {2, 1}).size());
}

void BM_EnumerateParallel(benchmark::State& state)
{
    auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(enumerate_graphs(n, 2, {2, 1}).size());
    state.counters["threads"] = omp_get_max_threads();
}

} // namespace

BENCHMARK(BM_McWeightSerial)->Arg(1 << 16)->Arg(1 << 18)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_McWeightParallel)->Arg(1 << 16)->Arg(1 << 18)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnumerateSerial)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnumerateParallel)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
