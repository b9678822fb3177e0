// Copyright 2026 The spikeguard Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <random>

#include "spikeguard/autodiff/ops.hpp"
#include "spikeguard/search/optimizer.hpp"
#include "spikeguard/snn/model.hpp"
#include "spikeguard/train/metrics.hpp"

using namespace spikeguard;

namespace {

std::vector<double> gaussian(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

// Block-2 shaped conv: 32 channels in, 128 out, length 14. Arg 0 is the
// percentage of non-zero inputs (spike maps are sparse).
void BM_Conv1dForward(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::bernoulli_distribution on(state.range(0) / 100.0);
  auto x = autodiff::make_tensor({32, 14});
  for (double& v : x->data()) v = on(rng) ? 1.0 : 0.0;
  auto w = autodiff::make_tensor({128, 32, 2}, gaussian(128 * 64, 2));
  auto b = autodiff::make_tensor({128});
  for (auto _ : state) {
    autodiff::Tape tape(false);
    benchmark::DoNotOptimize(autodiff::conv1d(tape, x, w, b));
  }
}
BENCHMARK(BM_Conv1dForward)->Arg(10)->Arg(50)->Arg(100);

void BM_Conv1dBackward(benchmark::State& state) {
  auto x = autodiff::make_tensor({32, 14}, gaussian(32 * 14, 3), true);
  auto w = autodiff::make_tensor({128, 32, 2}, gaussian(128 * 64, 4), true);
  auto b = autodiff::make_tensor({128}, true);
  for (auto _ : state) {
    autodiff::Tape tape;
    auto y = autodiff::conv1d(tape, x, w, b);
    auto s = autodiff::group_sum(tape, autodiff::reshape(tape, y, {y->size()}), 1);
    autodiff::backward(tape, s);
  }
}
BENCHMARK(BM_Conv1dBackward);

void BM_Forward(benchmark::State& state) {
  snn::ModelConfig c;
  c.timesteps = static_cast<std::size_t>(state.range(0));
  const auto p = snn::build(c, 1);
  const auto x = gaussian(30, 5);
  for (auto _ : state) benchmark::DoNotOptimize(snn::forward(p, c, x));
}
BENCHMARK(BM_Forward)->Arg(5)->Arg(20)->Unit(benchmark::kMicrosecond);

void BM_TrainStep(benchmark::State& state) {
  snn::ModelConfig c;
  const auto p = snn::build(c, 1);
  auto x = autodiff::make_tensor({1, 30}, gaussian(30, 6));
  for (auto _ : state) {
    autodiff::Tape tape;
    const auto rec = snn::forward(p, c, x, tape);
    const auto l = snn::loss(tape, rec, 1, {0.5, 45.0});
    autodiff::backward(tape, l);
  }
}
BENCHMARK(BM_TrainStep)->Unit(benchmark::kMicrosecond);

void BM_Calibrate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto scores = gaussian(n, 7);
  std::vector<int> labels(n, 0);
  for (std::size_t i = 0; i < n; i += 90) labels[i] = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(train::calibrate_threshold(scores, labels, 0.05));
  }
}
BENCHMARK(BM_Calibrate)->Arg(1000)->Arg(100000);

void BM_QUpdate(benchmark::State& state) {
  search::QTable q;
  std::size_t i = 0;
  for (auto _ : state) {
    search::q_update(q, i % 5, i % 10, 0.5, (i + 1) % 5);
    ++i;
  }
  benchmark::DoNotOptimize(q);
}
BENCHMARK(BM_QUpdate);

}  // namespace

BENCHMARK_MAIN();
