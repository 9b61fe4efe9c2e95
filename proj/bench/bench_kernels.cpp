// Serial reference kernels against the OpenMP versions on a (5,5) sample.
// Thread count comes from OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include "separ/kernels.hpp"
#include "separ/samplers.hpp"

namespace {

using separ::Matrix;
using separ::Vector;
namespace kernels = separ::kernels;

const Matrix& data(benchmark::State& state) {
  static Matrix cached;
  const auto n = static_cast<separ::Index>(state.range(0));
  if (cached.cols() != n) cached = separ::sample_matrix_normal(n, 5, 5, 7).vecs();
  return cached;
}

template <auto Kernel>
void scatter(benchmark::State& state) {
  const Matrix& x = data(state);
  const Vector mean = kernels::reference::column_mean(x);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(x, mean));
  state.SetItemsProcessed(state.iterations() * x.cols());
}

template <auto Kernel>
void unary(benchmark::State& state) {
  const Matrix& x = data(state);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(x));
  state.SetItemsProcessed(state.iterations() * x.cols());
}

template <auto Kernel>
void transform(benchmark::State& state) {
  const Matrix& x = data(state);
  const Vector mean = kernels::reference::column_mean(x);
  const Matrix t = Matrix::Identity(x.rows(), x.rows()) * 0.5;
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(x, mean, t));
  state.SetItemsProcessed(state.iterations() * x.cols());
}

}  // namespace

BENCHMARK(scatter<kernels::reference::centered_scatter>)->Name("centered_scatter/reference")->Arg(3200)->Arg(100000);
BENCHMARK(scatter<kernels::centered_scatter>)->Name("centered_scatter/parallel")->Arg(3200)->Arg(100000);
BENCHMARK(unary<kernels::reference::frobenius_sums>)->Name("frobenius_sums/reference")->Arg(3200)->Arg(100000);
BENCHMARK(unary<kernels::frobenius_sums>)->Name("frobenius_sums/parallel")->Arg(3200)->Arg(100000);
BENCHMARK(unary<kernels::reference::fourth_moment_scatter>)->Name("fourth_moment_scatter/reference")->Arg(3200)->Arg(20000);
BENCHMARK(unary<kernels::fourth_moment_scatter>)->Name("fourth_moment_scatter/parallel")->Arg(3200)->Arg(20000);
BENCHMARK(transform<kernels::reference::centered_transform>)->Name("centered_transform/reference")->Arg(3200)->Arg(100000);
BENCHMARK(transform<kernels::centered_transform>)->Name("centered_transform/parallel")->Arg(3200)->Arg(100000);

BENCHMARK_MAIN();
