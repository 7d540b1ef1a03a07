// Serial reference against the OpenMP path for the grid kernels. On a single
// core the two should be close; the gap shows the threading overhead.

#include <benchmark/benchmark.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "hpl/kernels.hpp"

namespace {

using cd = std::complex<double>;

struct Grid {
  std::vector<double> x, h;
  std::vector<cd> nodes, probes;
  std::vector<double> w;

  explicit Grid(std::size_t m) {
    for (std::size_t i = 0; i < m; ++i) {
      const double t = std::numbers::pi * (2.0 * static_cast<double>(i) + 1.0) / (2.0 * static_cast<double>(m));
      x.push_back(std::cos(t));
      h.push_back(std::numbers::pi * std::sin(t) / static_cast<double>(m));
      nodes.emplace_back(x.back(), 0.0);
      w.push_back(1.0 / static_cast<double>(m));
    }
    for (std::size_t i = 0; i < m; ++i) probes.push_back(std::polar(3.0, 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(m)));
  }
};

hpl::Exec exec_of(const benchmark::State& s) { return s.range(1) == 0 ? hpl::Exec::serial : hpl::Exec::parallel; }

void BM_LogKernel(benchmark::State& state) {
  const Grid g(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(hpl::log_kernel(g.x, g.h, exec_of(state)));
}

void BM_Potentials(benchmark::State& state) {
  const Grid g(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(hpl::potentials(g.probes, g.nodes, g.w, exec_of(state)));
}

void BM_CauchyTransforms(benchmark::State& state) {
  const Grid g(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(hpl::cauchy_transforms(g.probes, g.nodes, g.w, exec_of(state)));
}

// Second argument: 0 serial, 1 OpenMP.
void sizes(benchmark::internal::Benchmark* b) {
  for (int m : {100, 400, 1600})
    for (int e : {0, 1}) b->Args({m, e});
  b->ArgNames({"m", "omp"});
}

}  // namespace

BENCHMARK(BM_LogKernel)->Apply(sizes);
BENCHMARK(BM_Potentials)->Apply(sizes);
BENCHMARK(BM_CauchyTransforms)->Apply(sizes);

BENCHMARK_MAIN();
