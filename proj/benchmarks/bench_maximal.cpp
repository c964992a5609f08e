#include <benchmark/benchmark.h>

#include <random>

#include "oscilab/maximal.hpp"
#include "oscilab/sampled.hpp"

using namespace oscilab;

namespace {

SampledFunction bench_profile(std::size_t n) {
  std::mt19937_64 rng(99);
  const Grid1D g = make_grid(-2.0, 2.0, n, Grading::uniform);
  std::vector<double> v(g.size());
  double a = 1.0;
  for (auto& y : v) {
    a += (static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0) - 0.5) * 0.3;
    y = a;
  }
  return SampledFunction(g, std::move(v));
}

void BM_maximal_fast(benchmark::State& state) {
  const SampledFunction f = bench_profile(state.range(0));
  MaximalOptions opts;
  opts.algorithm = MaximalAlgorithm::fast;
  for (auto _ : state) {
    auto m = maximal_function(f, opts);
    benchmark::DoNotOptimize(m.values().data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_maximal_fast)->RangeMultiplier(2)->Range(256, 4096)->Complexity();

void BM_maximal_brute(benchmark::State& state) {
  const SampledFunction f = bench_profile(state.range(0));
  MaximalOptions opts;
  opts.algorithm = MaximalAlgorithm::brute;
  for (auto _ : state) {
    auto m = maximal_function(f, opts);
    benchmark::DoNotOptimize(m.values().data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_maximal_brute)->RangeMultiplier(2)->Range(256, 1024)->Complexity();

void BM_maximal_truncated(benchmark::State& state) {
  const SampledFunction f = bench_profile(state.range(0));
  MaximalOptions opts;
  opts.delta_trunc = 0.25;
  for (auto _ : state) {
    auto m = maximal_function(f, opts);
    benchmark::DoNotOptimize(m.values().data());
  }
}
BENCHMARK(BM_maximal_truncated)->Arg(1024)->Arg(4096);

void BM_mollify(benchmark::State& state) {
  const Grid1D g = make_grid(-1.0, 1.0, state.range(0), Grading::uniform);
  const SampledFunction f =
      sample(g, [](double x) { return std::abs(x) <= 0.4 ? 2.0 : 1.0; });
  for (auto _ : state) {
    auto m = mollify(f, 0.02);
    benchmark::DoNotOptimize(m.values().data());
  }
}
BENCHMARK(BM_mollify)->Arg(512)->Arg(2048);

}  // namespace
