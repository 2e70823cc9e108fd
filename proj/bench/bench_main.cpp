#include <benchmark/benchmark.h>

#include <random>

#include "stratmc/checker.hpp"
#include "stratmc/paritygame.hpp"
#include "stratmc/tables.hpp"

using namespace stratmc;

namespace {

ParityGame random_game(int nodes, int colors, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> node(0, nodes - 1), color(0, colors - 1), coin(0, 1);
  ParityGame g;
  for (int v = 0; v < nodes; ++v) g.add_node(coin(rng) ? Player::Exists : Player::Forall, color(rng));
  for (int v = 0; v < nodes; ++v)
    for (int e = 0; e < 3; ++e) g.succ[v].push_back(node(rng));
  return g;
}

void BM_Solve(benchmark::State& state) {
  const ParityGame g = random_game(static_cast<int>(state.range(0)), 8, 7);
  for (auto _ : state) benchmark::DoNotOptimize(solve(g));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Solve)->RangeMultiplier(4)->Range(256, 65536)->Unit(benchmark::kMillisecond);

void BM_FragmentQ1(benchmark::State& state) {
  Program p = load_program(std::string(STRATMC_CORPUS_DIR) + "/programs/q1.bw");
  p.bits = static_cast<int>(state.range(0));
  SystemEnv env;
  env.main = std::make_shared<const GameStructure>(stutterize(compile_to_cgs(p)));
  const FormulaPtr f = make_template("od_async", params_for(*env.main));
  for (auto _ : state) benchmark::DoNotOptimize(mc_fragment(env, f));
}
BENCHMARK(BM_FragmentQ1)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

// Serial reference path (1 worker) against the OpenMP batch.
void BM_BatchTables(benchmark::State& state) {
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(batch_tables(STRATMC_CORPUS_DIR, workers));
}
BENCHMARK(BM_BatchTables)->Arg(1)->Arg(4)->Iterations(1)->Unit(benchmark::kSecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
