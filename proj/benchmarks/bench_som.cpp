#include <benchmark/benchmark.h>

#include "ksom/ksom.hpp"

namespace {

ksom::Dataset standardized_sample(std::size_t rows, std::size_t cols, std::size_t m) {
    ksom::SyntheticSpec spec;
    spec.rows = rows;
    spec.cols = cols;
    const ksom::Dataset raw = ksom::generate_synthetic(spec);
    const ksom::Dataset z = ksom::standardize(raw, ksom::column_stats(raw));
    return m ? ksom::suppress(z, m, 7).data : z;
}

void BM_FindWinner(benchmark::State& state) {
    const auto side = static_cast<std::size_t>(state.range(0));
    const ksom::Dataset z = standardized_sample(200, 11, 3);
    const ksom::Codebook cb = ksom::initialize_codebook(z, ksom::GridTopology(side, side), ksom::InitPolicy::UniformRange, 1);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(ksom::find_winner(z[i], cb));
        i = (i + 1) % z.size();
    }
}
BENCHMARK(BM_FindWinner)->Arg(3)->Arg(7)->Arg(15);

void BM_Train(benchmark::State& state) {
    const ksom::Dataset z = standardized_sample(200, 11, 3);
    ksom::TrainingSchedule s;
    s.iterations = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(ksom::train(z, ksom::GridTopology(7, 7), s, ksom::InitPolicy::UniformRange));
    }
}
BENCHMARK(BM_Train)->Arg(1500)->Arg(15000)->Unit(benchmark::kMillisecond);

void BM_ImputeDataset(benchmark::State& state) {
    const ksom::Dataset z = standardized_sample(200, 11, 5);
    ksom::TrainingSchedule s;
    const ksom::Codebook cb = ksom::train(z, ksom::GridTopology(7, 7), s, ksom::InitPolicy::UniformRange);
    ksom::ImputeOptions o;
    o.mode = state.range(0) ? ksom::ImputeMode::Weighted : ksom::ImputeMode::Hard;
    for (auto _ : state) benchmark::DoNotOptimize(ksom::impute_dataset(z, cb, o));
}
BENCHMARK(BM_ImputeDataset)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
