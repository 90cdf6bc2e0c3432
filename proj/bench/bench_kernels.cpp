// Parallel kernels against their serial references.
//
//   ./build/bench/bench_kernels --benchmark_filter=Multiply

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "spmr/optimizer.hpp"
#include "spmr/pathcount.hpp"
#include "spmr/sparse.hpp"
#include "spmr/synth.hpp"
#include "spmr/transition.hpp"

namespace {

spmr::CountCsr random_binary(std::size_t rows, std::size_t cols, double density, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution edge(density);
  std::vector<spmr::Triplet<std::uint64_t>> trips;
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      if (edge(rng)) trips.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), 1});
  return spmr::CountCsr::from_triplets(rows, cols, trips, [](auto x, auto) { return x; });
}

void BM_Multiply(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_binary(n, n / 2, 0.05, 1);
  const auto b = random_binary(n / 2, n, 0.05, 2);
  for (auto _ : state) benchmark::DoNotOptimize(spmr::multiply(a, b));
}
BENCHMARK(BM_Multiply)->Arg(500)->Arg(2000);

void BM_MultiplyReference(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_binary(n, n / 2, 0.05, 1);
  const auto b = random_binary(n / 2, n, 0.05, 2);
  for (auto _ : state) benchmark::DoNotOptimize(spmr::multiply_reference(a, b));
}
BENCHMARK(BM_MultiplyReference)->Arg(500)->Arg(2000);

struct Problem {
  spmr::AffinityStack stack;
  spmr::TransitionModel model;
  std::vector<double> w;
};

Problem make_problem(std::size_t n) {
  auto ground = spmr::generate(spmr::planted_benchmark(n, 3, 3, 3, 3, 5));
  auto paths = spmr::enumerate_metapaths(ground.graph, 2);
  Problem p{spmr::build_affinity_stack(ground.graph, paths), {}, {}};
  p.model = spmr::build_transition_model(p.stack);
  p.w.assign(p.stack.size(), 0.5);
  return p;
}

void BM_Evaluate(benchmark::State& state) {
  const auto p = make_problem(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(spmr::evaluate(p.stack, p.model, p.w, 0.1));
}
BENCHMARK(BM_Evaluate)->Arg(200)->Arg(600);

void BM_EvaluateReference(benchmark::State& state) {
  const auto p = make_problem(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(spmr::evaluate_reference(p.stack, p.model, p.w, 0.1));
}
BENCHMARK(BM_EvaluateReference)->Arg(200)->Arg(600);

}  // namespace

BENCHMARK_MAIN();
