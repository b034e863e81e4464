/*
 * Copyright 2026 The maml-lqr Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "maml_lqr/maml_lqr.hpp"

namespace {

using namespace maml_lqr;

LqrTask random_task(Eigen::Index d, Eigen::Index r, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  auto draw = [&](Eigen::Index rows, Eigen::Index cols, double scale) {
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = scale * n(rng);
    return m;
  };
  const Matrix I = Matrix::Identity(d, d);
  return LqrTask(draw(d, d, 0.5 / std::sqrt(static_cast<double>(d))), draw(d, r, 1.0), I,
                 Matrix::Identity(r, r), I);
}

void BM_EvalCost(benchmark::State& state) {
  const Eigen::Index d = state.range(0);
  const LqrTask task = random_task(d, d, 1);
  const Policy w = task.riccati().w_star;
  for (auto _ : state) benchmark::DoNotOptimize(eval_cost(task, w).value);
}
BENCHMARK(BM_EvalCost)->Arg(1)->Arg(3)->Arg(10)->Arg(20);

void BM_Lyapunov(benchmark::State& state) {
  const Eigen::Index d = state.range(0);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix M(d, d);
  for (Eigen::Index i = 0; i < M.size(); ++i) M.data()[i] = u(rng);
  M *= 0.9 / spectral_radius(M);
  const Matrix C = Matrix::Identity(d, d);
  for (auto _ : state) benchmark::DoNotOptimize(solve_discrete_lyapunov(M, C).data());
}
BENCHMARK(BM_Lyapunov)->Arg(5)->Arg(20)->Arg(21)->Arg(40);

void BM_CostGradient(benchmark::State& state) {
  const LqrTask task = random_task(state.range(0), 2, 3);
  const Policy w = task.riccati().w_star;
  for (auto _ : state) benchmark::DoNotOptimize(cost_gradient(task, w).data());
}
BENCHMARK(BM_CostGradient)->Arg(3)->Arg(10);

void BM_MamlGradientScalar(benchmark::State& state) {
  std::vector<LqrTask> tasks;
  for (int k = 0; k < state.range(0); ++k) tasks.push_back(LqrTask::scalar(1, 1, 1 + k, 2, 1));
  const TaskSet ts = TaskSet::uniform(tasks);
  const MamlConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(maml_gradient(ts, Policy::scalar(0.9), cfg).data());
}
BENCHMARK(BM_MamlGradientScalar)->Arg(1)->Arg(11);

void BM_LandscapeScalar(benchmark::State& state) {
  const TaskSet ts = TaskSet::uniform({LqrTask::scalar(1, 1, 2, 2, 1), LqrTask::scalar(1, 1, 0.1, 0.1, 1)});
  const MamlConfig cfg;
  const ScanGrid grid = ScanGrid::scalar(0.01, 1.99, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(analyze_landscape(maml_objective(ts, cfg), grid).epsilon_gap);
  }
}
BENCHMARK(BM_LandscapeScalar)->Arg(1001)->Arg(4001)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
