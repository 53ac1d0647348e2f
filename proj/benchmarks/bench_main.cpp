#include <benchmark/benchmark.h>

#include <random>

#include "stegopt/brute.hpp"
#include "stegopt/codec.hpp"
#include "stegopt/imaging.hpp"
#include "stegopt/milp.hpp"

namespace {

stegopt::AbsErrorHistogram synthetic_histogram(int n) {
    // roughly exponential error mass, the shape the predictor produces
    stegopt::AbsErrorHistogram hist;
    double mass = 16000.0;
    for (int i = 0; i <= n; ++i) {
        hist.counts.push_back(static_cast<std::uint64_t>(mass));
        mass *= 0.72;
    }
    return hist;
}

void BM_BruteOptimize(benchmark::State& state) {
    const int theta = static_cast<int>(state.range(0));
    const auto hist = synthetic_histogram(24);
    const stegopt::ProblemSpec spec{24, theta, 9000.0 * theta, hist};
    for (auto _ : state) {
        benchmark::DoNotOptimize(stegopt::brute_force_optimize(spec));
    }
}
BENCHMARK(BM_BruteOptimize)->Arg(1)->Arg(2)->Arg(3);

void BM_MilpOptimize(benchmark::State& state) {
    const int theta = static_cast<int>(state.range(0));
    const auto hist = synthetic_histogram(24);
    const stegopt::ProblemSpec spec{24, theta, 9000.0 * theta, hist};
    for (auto _ : state) {
        benchmark::DoNotOptimize(stegopt::iterate_optimize(spec));
    }
}
BENCHMARK(BM_MilpOptimize)->Arg(1)->Arg(2)->Arg(3);

void BM_TotalFeasible(benchmark::State& state) {
    const int theta = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(stegopt::total_feasible(theta, 56));
    }
}
BENCHMARK(BM_TotalFeasible)->Arg(2)->Arg(4)->Arg(6);

void BM_EncodeDecode(benchmark::State& state) {
    stegopt::ImageGrid cover;
    cover.width = 256;
    cover.height = 256;
    cover.pixels.resize(256 * 256);
    std::mt19937 rng(1);
    std::uniform_int_distribution<int> noise(-3, 3);
    for (int r = 0; r < 256; ++r)
        for (int c = 0; c < 256; ++c)
            cover.at(r, c) = static_cast<std::uint8_t>(std::clamp(100 + r / 4 + noise(rng), 0, 255));
    const stegopt::LinkVector x{0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0};
    const auto message = stegopt::random_message(2000, 7);
    for (auto _ : state) {
        const auto stego = stegopt::encode(cover, x, message);
        benchmark::DoNotOptimize(stegopt::decode(stego, x));
    }
}
BENCHMARK(BM_EncodeDecode);

}  // namespace

BENCHMARK_MAIN();
