#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "lrdemp/kernels.hpp"
#include "lrdemp/multilinear.hpp"
#include "lrdemp/process.hpp"

using namespace lrdemp;

namespace {

struct FilterInput {
  std::vector<double> c, e;
  std::size_t n;
};

FilterInput make_input(std::size_t n, std::size_t K) {
  FilterInput in{gen_coefficients(0.7, K).c, std::vector<double>(n + K), n};
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z;
  for (auto& v : in.e) v = z(rng);
  return in;
}

template <auto Kernel>
void BM_filter(benchmark::State& state) {
  const auto in = make_input(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  const std::size_t K = in.c.size() - 1;
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(in.c, in.e, K, in.n));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(in.n));
}

template <auto Kernel>
void BM_autocov(benchmark::State& state) {
  const auto c = gen_coefficients(0.7, static_cast<std::size_t>(state.range(1))).c;
  const auto lags = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(c, lags));
}

void BM_generate(benchmark::State& state) {
  ProcessConfig cfg;
  cfg.beta = 0.7;
  cfg.trunc_K = static_cast<std::size_t>(state.range(1));
  const PathGenerator gen(cfg, static_cast<std::size_t>(state.range(0)));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(gen.generate(++seed));
}

void BM_exact_sigma2(benchmark::State& state) {
  const auto c = gen_coefficients(0.65, std::size_t{1} << 16);
  for (auto _ : state) benchmark::DoNotOptimize(exact_sigma2_sq(static_cast<std::size_t>(state.range(0)), c));
}

}  // namespace

// Direct loops are O(nK); keep their sizes modest.
BENCHMARK(BM_filter<kernels::causal_filter_serial>)->Args({1024, 1024})->Args({4096, 4096});
BENCHMARK(BM_filter<kernels::causal_filter_omp>)->Args({1024, 1024})->Args({4096, 4096});
BENCHMARK(BM_filter<kernels::causal_filter_fft>)->Args({1024, 1024})->Args({4096, 4096})->Args({16384, 65536});
BENCHMARK(BM_autocov<kernels::autocovariance_serial>)->Args({1024, 4096})->Args({4096, 16384});
BENCHMARK(BM_autocov<kernels::autocovariance_omp>)->Args({1024, 4096})->Args({4096, 16384});
BENCHMARK(BM_autocov<kernels::autocovariance_fft>)->Args({1024, 4096})->Args({4096, 16384})->Args({16384, 65536});
BENCHMARK(BM_generate)->Args({4096, 65536})->Args({16384, 65536})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_exact_sigma2)->Arg(4096)->Arg(16384)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
