// Copyright The limor Authors.
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "limor/reduction.hpp"

namespace
{

limor::StateSpaceModel model_of_size(Eigen::Index n)
{
  return limor::random_stable_model(n, 2, 2, 7, 5.0);
}

void BM_Sylvester(benchmark::State &state)
{
  const Eigen::Index n = state.range(0);
  const limor::Mat A = model_of_size(n).A();
  const limor::Mat B = model_of_size(8).A().transpose();
  const limor::Mat C = limor::Mat::Random(n, 8);
  for (auto _ : state) benchmark::DoNotOptimize(limor::solve_sylvester(A, B, C));
}
BENCHMARK(BM_Sylvester)->Arg(50)->Arg(200);

void BM_FreqLogGain(benchmark::State &state)
{
  const limor::Mat A = model_of_size(state.range(0)).A();
  for (auto _ : state) benchmark::DoNotOptimize(limor::freq_log_gain(A, {0.5, 4.0}));
}
BENCHMARK(BM_FreqLogGain)->Arg(50)->Arg(200);

void BM_HmorIteration(benchmark::State &state)
{
  const auto problem = limor::make_problem(model_of_size(state.range(0)), limor::LimitSpec::frequency(0.0, 4.0));
  const auto init = limor::random_stable_model(6, 2, 2, 11, 4.0);
  limor::ConvergenceControl one{1, 0.0, 10};
  for (auto _ : state) benchmark::DoNotOptimize(limor::hmor(problem, init, one));
}
BENCHMARK(BM_HmorIteration)->Arg(60);

}  // namespace

BENCHMARK_MAIN();
