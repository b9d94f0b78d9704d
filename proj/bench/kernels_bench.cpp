// Serial vs OpenMP kernels, and FFTW vs naive DCT.
#include <benchmark/benchmark.h>

#include <vector>

#include "ssn/kernels.hpp"
#include "ssn/operator.hpp"
#include "ssn/problems.hpp"

namespace {

using namespace ssn;

std::vector<double> random_vec(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

template <bool Parallel>
void BM_dot(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto x = random_vec(n, 1), y = random_vec(n, 2);
  for (auto _ : st) {
    double d = Parallel ? kernels::parallel::dot(x, y) : kernels::serial::dot(x, y);
    benchmark::DoNotOptimize(d);
  }
  st.SetBytesProcessed(static_cast<int64_t>(st.iterations()) * static_cast<int64_t>(2 * n * sizeof(double)));
}

template <bool Parallel>
void BM_axpby(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto x = random_vec(n, 1);
  auto y = random_vec(n, 2);
  for (auto _ : st) {
    if (Parallel)
      kernels::parallel::axpby(0.5, x, 0.5, y);
    else
      kernels::serial::axpby(0.5, x, 0.5, y);
    benchmark::ClobberMemory();
  }
}

template <bool Parallel>
void BM_shrink(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto x = random_vec(n, 1);
  std::vector<double> out(n);
  std::vector<std::uint8_t> mask(n);
  for (auto _ : st) {
    if (Parallel)
      kernels::parallel::shrink(x, 0.5, out, mask);
    else
      kernels::serial::shrink(x, 0.5, out, mask);
    benchmark::ClobberMemory();
  }
}

void BM_dct_fftw(benchmark::State& st) {
  const auto n = static_cast<Index>(st.range(0));
  const auto v = random_vec(static_cast<std::size_t>(n), 3);
  const Vector x = Eigen::Map<const Vector>(v.data(), n);
  for (auto _ : st) benchmark::DoNotOptimize(dct_orthonormal(x));
}

void BM_dct_naive(benchmark::State& st) {
  const auto n = static_cast<Index>(st.range(0));
  const auto v = random_vec(static_cast<std::size_t>(n), 3);
  const Vector x = Eigen::Map<const Vector>(v.data(), n);
  for (auto _ : st) benchmark::DoNotOptimize(dct_orthonormal_naive(x));
}

}  // namespace

BENCHMARK(BM_dot<false>)->RangeMultiplier(8)->Range(1 << 12, 1 << 21);
BENCHMARK(BM_dot<true>)->RangeMultiplier(8)->Range(1 << 12, 1 << 21);
BENCHMARK(BM_axpby<false>)->RangeMultiplier(8)->Range(1 << 12, 1 << 21);
BENCHMARK(BM_axpby<true>)->RangeMultiplier(8)->Range(1 << 12, 1 << 21);
BENCHMARK(BM_shrink<false>)->RangeMultiplier(8)->Range(1 << 12, 1 << 21);
BENCHMARK(BM_shrink<true>)->RangeMultiplier(8)->Range(1 << 12, 1 << 21);
BENCHMARK(BM_dct_fftw)->RangeMultiplier(4)->Range(256, 4096);
BENCHMARK(BM_dct_naive)->RangeMultiplier(4)->Range(256, 4096);

BENCHMARK_MAIN();
