#include <benchmark/benchmark.h>

#include <cmath>

#include "oscilab/oscillation.hpp"
#include "oscilab/sampled.hpp"
#include "oscilab/weights.hpp"

using namespace oscilab;

namespace {

void BM_weighted_bmo_norm(benchmark::State& state) {
  const Grid1D g = make_grid(-1.0, 1.0, 1024, Grading::uniform);
  const SampledFunction f = sample(g, [](double x) { return std::log(std::abs(x)); });
  const LogWeight w(1);
  SearchParams sp;
  sp.density = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto rep = weighted_bmo_norm(f, w, 0.25, sp);
    benchmark::DoNotOptimize(rep.sup_part);
  }
}
BENCHMARK(BM_weighted_bmo_norm)->Arg(8)->Arg(16)->Arg(32);

void BM_mean_oscillation(benchmark::State& state) {
  const Grid1D g = make_grid(-1.0, 1.0, 4096, Grading::uniform);
  const SampledFunction f = sample(g, [](double x) { return std::sin(20.0 * x); });
  for (auto _ : state) {
    double acc = 0.0;
    for (double a = -0.9; a < 0.7; a += 0.05)
      acc += mean_oscillation(f, Interval(a, a + 0.2));
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(BM_mean_oscillation);

}  // namespace
