#include "flowgraph/community.hpp"
#include "flowgraph/spectral.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace flowgraph;

namespace {

// Random traffic: `windows` one-minute windows over `hosts` endpoints.
FlowLog synthetic_log(int windows, int flows_per_window, int hosts)
{
    std::mt19937_64 rng(7);
    FlowLog log;
    log.table.columns = {"stime", "saddr", "daddr", "pkts", "bytes", "rate", "category"};
    for (int w = 0; w < windows; ++w)
        for (int k = 0; k < flows_per_window; ++k) {
            FlowRecord r;
            r.timestamp = 60.0 * w + 60.0 * k / flows_per_window;
            r.src_keys = {"h" + std::to_string(rng() % hosts)};
            r.dst_keys = {"h" + std::to_string(rng() % hosts)};
            r.pkts = static_cast<double>(1 + rng() % 50);
            r.bytes = r.pkts * 512.0;
            r.rate = r.pkts / 2.0;
            r.label = "Normal";
            r.row = log.records.size();
            log.table.rows.push_back({std::to_string(r.timestamp), r.src_keys[0], r.dst_keys[0],
                                      std::to_string(r.pkts), std::to_string(r.bytes),
                                      std::to_string(r.rate), r.label});
            log.records.push_back(std::move(r));
        }
    return log;
}

const FlowLog& bench_log()
{
    static const FlowLog log = synthetic_log(16, 1500, 250);
    return log;
}

void BM_SpectralSerial(benchmark::State& state)
{
    SpectralConfig cfg;
    cfg.device_count = 8;
    for (auto _ : state)
        benchmark::DoNotOptimize(spectral_metrics_extractor_serial(bench_log().records, 60.0, cfg));
}

void BM_SpectralParallel(benchmark::State& state)
{
    SpectralConfig cfg;
    cfg.device_count = 8;
    for (auto _ : state)
        benchmark::DoNotOptimize(spectral_metrics_extractor(bench_log().records, 60.0, cfg));
}

void BM_CommunitySerial(benchmark::State& state)
{
    EnrichOptions o;
    o.interval = 60.0;
    for (auto _ : state)
        benchmark::DoNotOptimize(insert_graph_community_metrics_serial(bench_log(), o));
}

void BM_CommunityParallel(benchmark::State& state)
{
    EnrichOptions o;
    o.interval = 60.0;
    for (auto _ : state)
        benchmark::DoNotOptimize(insert_graph_community_metrics(bench_log(), o));
}

} // namespace

BENCHMARK(BM_SpectralSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SpectralParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CommunitySerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CommunityParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
