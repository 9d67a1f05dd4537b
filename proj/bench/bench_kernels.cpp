#include <benchmark/benchmark.h>

#include <filesystem>

#include "rslab/rankin.hpp"
#include "rslab/reference.hpp"

using namespace rslab;

namespace {

CurveSpec curve37()
{
    CurveSpec c;
    c.label = "37a";
    c.ainv = {0, 0, 1, -1, 0};
    c.conductor = 37;
    c.root_number = -1;
    return c;
}

std::filesystem::path bench_cache()
{
    return std::filesystem::temp_directory_path() / "rslab_bench_cache";
}

void BM_table_parallel(benchmark::State & state)
{
    for (auto _ : state)
        benchmark::DoNotOptimize(build_table(curve37(), state.range(0)));
}

void BM_table_serial(benchmark::State & state)
{
    for (auto _ : state)
        benchmark::DoNotOptimize(reference::build_table(curve37(), state.range(0)));
}

void BM_average_parallel(benchmark::State & state)
{
    TruncationParams p;
    p.cutoff_mult = 4;
    RankinEngine e(curve37(), p, bench_cache());
    auto const D = FundamentalDiscriminant::from_discriminant(state.range(0));
    e.table(e.cutoff(D));
    for (auto _ : state) {
        RankinEngine fresh(curve37(), p, bench_cache());
        benchmark::DoNotOptimize(fresh.average_direct(D, true));
    }
}

void BM_average_serial(benchmark::State & state)
{
    TruncationParams p;
    p.cutoff_mult = 4;
    RankinEngine e(curve37(), p, bench_cache());
    auto const D = FundamentalDiscriminant::from_discriminant(state.range(0));
    auto const & t = e.table(e.cutoff(D));
    for (auto _ : state)
        benchmark::DoNotOptimize(reference::average_direct(t, D, e.cutoff(D)));
}

} // namespace

BENCHMARK(BM_table_parallel)->Arg(20000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_table_serial)->Arg(20000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_average_parallel)->Arg(-47)->Arg(-71)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_average_serial)->Arg(-47)->Arg(-71)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
