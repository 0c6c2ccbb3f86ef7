#include <benchmark/benchmark.h>

#include "dilemma/closed_form.hpp"
#include "dilemma/equilibrium.hpp"
#include "dilemma/exact_solver.hpp"
#include "dilemma/qlearning.hpp"

using namespace dilemma;

namespace {

const PDGame kGame = validate_game(4, 0, 6, 1, 0.9);
const MemoryOneStrategy kWslsOpp = swap_perspective(strategies::kWsls).to_memory_one();

void BM_PolicyEvaluation(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(policy_evaluation(kGame, strategies::kWsls, kWslsOpp));
}
BENCHMARK(BM_PolicyEvaluation);

void BM_BestResponse(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(best_response(kGame, kWslsOpp));
}
BENCHMARK(BM_BestResponse);

void BM_ValueIteration(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(value_iteration(kGame, kWslsOpp, 1e-8));
}
BENCHMARK(BM_ValueIteration);

void BM_CaseVerdicts(benchmark::State& state) {
  for (auto _ : state) {
    for (int id = 1; id <= 16; ++id) benchmark::DoNotOptimize(case_consistent(kGame, id));
  }
}
BENCHMARK(BM_CaseVerdicts);

void BM_SymmetricEquilibria(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(symmetric_equilibria(kGame));
}
BENCHMARK(BM_SymmetricEquilibria);

void BM_LearnPhase(benchmark::State& state) {
  LearnerConfig config;
  config.steps_per_phase = state.range(0);
  config.sample_every = config.steps_per_phase;
  const NoisyStrategy opp(kWslsOpp, 0.0);
  for (auto _ : state) {
    EnvStreams streams = EnvStreams::derive(1, 0, 0);
    benchmark::DoNotOptimize(learn_phase(kGame, opp, config, QTable{}, StateProfile::CC, streams));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LearnPhase)->Arg(10000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
