// OpenMP kernels against their serial references. Run with --benchmark_filter
// and OMP_NUM_THREADS to compare team sizes.

#include <random>

#include <benchmark/benchmark.h>

#include "cropweed/serial.hpp"
#include "synthetic.hpp"

using namespace cropweed;

namespace {

GrayImage noise_image(std::size_t side) {
    std::mt19937_64 rng{1};
    std::uniform_int_distribution<int> u{0, 255};
    std::vector<std::uint16_t> v(side * side);
    for (auto &x : v) {
        x = static_cast<std::uint16_t>(u(rng));
    }
    return GrayImage::from_values(side, side, 256, v);
}

FeatureMatrix noise_features(std::size_t n) {
    std::mt19937_64 rng{2};
    std::normal_distribution<double> g;
    FeatureMatrix x{n, 31};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < 31; ++k) {
            x(i, k) = g(rng);
        }
    }
    return x;
}

const DatasetManifest &bench_tree() {
    static const DatasetManifest m =
        scan_dataset(testing::write_synthetic_dataset(testing::scratch_dir("bench_tree"), 25, 5, 96));
    return m;
}

void BM_GlcmParallel(benchmark::State &state) {
    const auto img = noise_image(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(glcm_counts(img, {}));
    }
}

void BM_GlcmSerial(benchmark::State &state) {
    const auto img = noise_image(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(serial::glcm_counts(img, {}));
    }
}

void BM_LbpParallel(benchmark::State &state) {
    const auto img = noise_image(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(lbp_counts(img, {}));
    }
}

void BM_LbpSerial(benchmark::State &state) {
    const auto img = noise_image(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(serial::lbp_counts(img, {}));
    }
}

void BM_KernelMatrixParallel(benchmark::State &state) {
    const auto x = noise_features(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernel_matrix(RbfKernel{0.1}, x));
    }
}

void BM_KernelMatrixSerial(benchmark::State &state) {
    const auto x = noise_features(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(serial::kernel_matrix(RbfKernel{0.1}, x));
    }
}

void BM_ExtractParallel(benchmark::State &state) {
    const auto &m = bench_tree();
    for (auto _ : state) {
        benchmark::DoNotOptimize(extract_features(m, {}));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m.total()));
}

void BM_ExtractSerial(benchmark::State &state) {
    const auto &m = bench_tree();
    for (auto _ : state) {
        benchmark::DoNotOptimize(serial::extract_features(m, {}));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m.total()));
}

}  // namespace

BENCHMARK(BM_GlcmParallel)->Arg(128)->Arg(512);
BENCHMARK(BM_GlcmSerial)->Arg(128)->Arg(512);
BENCHMARK(BM_LbpParallel)->Arg(128)->Arg(512);
BENCHMARK(BM_LbpSerial)->Arg(128)->Arg(512);
BENCHMARK(BM_KernelMatrixParallel)->Arg(280)->Arg(1000);
BENCHMARK(BM_KernelMatrixSerial)->Arg(280)->Arg(1000);
BENCHMARK(BM_ExtractParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExtractSerial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
