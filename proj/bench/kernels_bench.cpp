// Serial vs OpenMP twins of the data-parallel kernels, plus a seed sweep of
// whole ACDM runs executed one after another vs through run_experiment's
// thread pool.
#include <benchmark/benchmark.h>

#include <filesystem>
#include <random>

#include "acdm/csr_matrix.hpp"
#include "acdm/experiment.hpp"
#include "acdm/kernels.hpp"
#include "acdm/rng.hpp"

namespace {

acdm::CsrMatrix banded(std::size_t n, std::size_t half_width) {
  std::vector<acdm::Triplet> t;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= half_width ? i - half_width : 0;
    const std::size_t hi = std::min(n - 1, i + half_width);
    for (std::size_t j = lo; j <= hi; ++j) t.push_back({i, j, i == j ? 2.0 * static_cast<double>(half_width) + 1.0 : -1.0});
  }
  return acdm::CsrMatrix::from_triplets(n, n, t);
}

acdm::Vector random_vec(std::size_t n, std::uint64_t seed) {
  acdm::Rng rng(seed);
  acdm::Vector v(n);
  for (double& x : v) x = 2.0 * acdm::uniform01(rng) - 1.0;
  return v;
}

template <bool Omp>
void BM_Spmv(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const acdm::CsrMatrix m = banded(n, 8);
  const acdm::Vector x = random_vec(n, 1);
  acdm::Vector y(n);
  for (auto _ : state) {
    if constexpr (Omp) {
      acdm::kernels::spmv_omp(m, x, y);
    } else {
      acdm::kernels::spmv_serial(m, x, y);
    }
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * m.nnz()));
}

template <bool Omp>
void BM_Dot(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const acdm::Vector a = random_vec(n, 2), b = random_vec(n, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(Omp ? acdm::kernels::dot_omp(a, b) : acdm::kernels::dot_serial(a, b));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

template <bool Omp>
void BM_Axpy(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const acdm::Vector x = random_vec(n, 4);
  acdm::Vector y = random_vec(n, 5);
  for (auto _ : state) {
    if constexpr (Omp) {
      acdm::kernels::axpy_omp(1e-9, x, y);
    } else {
      acdm::kernels::axpy_serial(1e-9, x, y);
    }
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

void BM_SeedSweep(benchmark::State& state) {
  const int threads = static_cast<int>(state.range(0));
  acdm::ExperimentSpec spec;
  spec.problem = "spd";
  spec.gen = {{"n", "60"}, {"cond", "100"}};
  spec.methods = {{"acdm", "acdm", {}}};
  spec.seed_lo = 0;
  spec.seed_hi = 7;
  spec.max_iters = 20000;
  spec.out = std::filesystem::temp_directory_path() / ("acdm_bench_sweep_" + std::to_string(threads));
  for (auto _ : state) acdm::run_experiment(spec, threads);
  std::filesystem::remove_all(spec.out);
}

}  // namespace

BENCHMARK(BM_Spmv<false>)->Name("spmv/serial")->RangeMultiplier(8)->Range(1 << 12, 1 << 18);
BENCHMARK(BM_Spmv<true>)->Name("spmv/omp")->RangeMultiplier(8)->Range(1 << 12, 1 << 18);
BENCHMARK(BM_Dot<false>)->Name("dot/serial")->RangeMultiplier(8)->Range(1 << 12, 1 << 21);
BENCHMARK(BM_Dot<true>)->Name("dot/omp")->RangeMultiplier(8)->Range(1 << 12, 1 << 21);
BENCHMARK(BM_Axpy<false>)->Name("axpy/serial")->RangeMultiplier(8)->Range(1 << 12, 1 << 21);
BENCHMARK(BM_Axpy<true>)->Name("axpy/omp")->RangeMultiplier(8)->Range(1 << 12, 1 << 21);
BENCHMARK(BM_SeedSweep)->Name("seed_sweep/threads")->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
