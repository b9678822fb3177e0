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

#include <doctest.h>

#include <cmath>
#include <random>

#include "spikeguard/errors.hpp"
#include "spikeguard/snn/model.hpp"
#include "support/grad_check.hpp"

using namespace spikeguard;
using namespace spikeguard::snn;

namespace {

ModelConfig small_config(std::size_t population = 2, std::size_t steps = 3,
                         std::size_t features = 16) {
  ModelConfig c;
  c.population = population;
  c.timesteps = steps;
  c.num_features = features;
  return c;
}

std::vector<double> gaussian_row(std::size_t n, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, scale);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

}  // namespace

TEST_CASE("length chain for 30 features") {
  CHECK(length_chain(30) == std::vector<std::size_t>{30, 29, 14, 13, 6, 5, 2});
  ModelConfig c;
  CHECK(flat_features(c) == 512);
}

TEST_CASE("parameter count matches the layer formula") {
  ModelConfig c;
  const auto p = build(c, 0);
  const std::size_t expected = (32 * 1 * 2 + 32) + (128 * 32 * 2 + 128) + (256 * 128 * 2 + 256) +
                               (20 * 512 + 20);
  CHECK(count_params(p) == expected);
  CHECK(p.fc_w->shape() == autodiff::Shape{20, 512});
}

TEST_CASE("build is seeded and respects the He bound") {
  ModelConfig c;
  const auto a = build(c, 42);
  const auto b = build(c, 42);
  const auto d = build(c, 43);
  CHECK(a.conv2_w->values() == b.conv2_w->values());
  CHECK(a.conv2_w->values() != d.conv2_w->values());
  const double bound = std::sqrt(6.0 / 64.0);
  for (double v : a.conv2_w->values()) CHECK(std::abs(v) <= bound);
  for (double v : a.conv3_b->values()) CHECK(v == 0.0);
}

TEST_CASE("config validation lists every problem") {
  ModelConfig c;
  c.population = 3;
  c.timesteps = 0;
  c.decay[1] = 1.0;
  try {
    c.validate();
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("population") != std::string::npos);
    CHECK(msg.find("timesteps") != std::string::npos);
    CHECK(msg.find("decay[1]") != std::string::npos);
  }
  c = ModelConfig{};
  c.num_features = 14;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK_THROWS_AS(build(c, 0), ConfigError);
}

TEST_CASE("forward rejects a mismatched input") {
  ModelConfig c;
  const auto p = build(c, 1);
  std::vector<double> x(29, 0.0);
  CHECK_THROWS_AS(forward(p, c, x), DimensionError);
}

TEST_CASE("forward shapes and spike values") {
  ModelConfig c = small_config(4, 5, 30);
  const auto p = build(c, 3);
  const auto x = gaussian_row(30, 9);
  const auto rec = forward(p, c, x, ForwardOptions{autodiff::SpikeFn::kHeaviside, true});
  CHECK(rec.out_spikes.shape() == autodiff::Shape{5, 4});
  CHECK(rec.currents.shape() == autodiff::Shape{5, 4});
  REQUIRE(rec.spikes.size() == kLayers);
  CHECK(rec.spikes[0].shape() == autodiff::Shape{5, 32, 14});
  CHECK(rec.spikes[1].shape() == autodiff::Shape{5, 128, 6});
  CHECK(rec.spikes[2].shape() == autodiff::Shape{5, 256, 2});
  for (const auto& layer : rec.spikes) {
    for (double v : layer.values()) CHECK((v == 0.0 || v == 1.0));
  }
  // output membrane follows the recurrence driven by the recorded currents
  const auto lif = c.lif(3);
  std::vector<double> u(4, 0.0), s(4, 0.0);
  for (std::size_t t = 0; t < 5; ++t) {
    for (std::size_t i = 0; i < 4; ++i) {
      u[i] = lif.beta * u[i] + rec.currents[t * 4 + i] - s[i] * lif.theta;
      s[i] = u[i] >= lif.theta ? 1.0 : 0.0;
      CHECK(rec.membranes[3][t * 4 + i] == doctest::Approx(u[i]).epsilon(1e-12));
      CHECK(rec.out_spikes[t * 4 + i] == s[i]);
    }
  }
}

TEST_CASE("forward is deterministic and tape-independent") {
  ModelConfig c = small_config(6, 4, 20);
  const auto p = build(c, 5);
  const auto x = gaussian_row(20, 2, 2.0);
  const auto r1 = forward(p, c, x);
  const auto r2 = forward(p, c, x);
  CHECK(r1.out_spikes.values() == r2.out_spikes.values());
  autodiff::Tape tape;
  auto xt = autodiff::make_tensor({1, 20}, x);
  const auto r3 = forward(p, c, xt, tape);
  CHECK(r3.out_spikes.values() == r1.out_spikes.values());
  CHECK(r3.counts->values() == r1.counts->values());
  CHECK_FALSE(tape.empty());
}

TEST_CASE("decode examples") {
  auto d = decode_counts(0, 0);
  CHECK(d.predicted == 0);
  CHECK(d.fraud_score == 0.5);
  d = decode_counts(3, 3);
  CHECK(d.predicted == 0);
  d = decode_counts(2, 5);
  CHECK(d.predicted == 1);
  CHECK(d.fraud_score == doctest::Approx(6.0 / 9.0));

  ForwardRecord rec;
  rec.out_spikes = Tensor({2, 4}, {1, 0, 0, 1, 0, 0, 1, 1});
  const auto dd = decode(rec, 4);
  CHECK(dd.counts == std::array<double, 2>{1, 3});
  CHECK(dd.predicted == 1);
  CHECK_THROWS_AS(decode(rec, 6), DimensionError);
  CHECK_THROWS_AS(decode(rec, 3), DimensionError);
}

TEST_CASE("decode agrees with counts carried on the record") {
  ModelConfig c = small_config(8, 6, 30);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto p = build(c, seed);
    const auto rec = forward(p, c, gaussian_row(30, seed + 100, 2.0));
    const auto d = decode(rec, 8);
    CHECK(d.counts[0] == (*rec.counts)[0]);
    CHECK(d.counts[1] == (*rec.counts)[1]);
  }
}

TEST_CASE("fraud score is monotone in the class-1 count") {
  for (double n0 = 0; n0 < 6; ++n0) {
    for (double n1 = 0; n1 < 6; ++n1) {
      CHECK(decode_counts(n0, n1 + 1).fraud_score > decode_counts(n0, n1).fraud_score);
      CHECK(decode_counts(n0 + 1, n1).fraud_score < decode_counts(n0, n1).fraud_score);
    }
  }
}

TEST_CASE("full-model gradient matches finite differences (sampled)") {
  const ModelConfig c = small_config();
  for (std::uint64_t seed : {1u, 2u}) {
    const auto res = testing_support::model_grad_check(c, seed, 80, 1e-4);
    INFO("seed " << seed << " passed " << res.passed << "/" << res.checked);
    CHECK(res.fraction() >= 0.95);
  }
}

TEST_CASE("loss is ln 2 on balanced counts with unit weights") {
  ForwardRecord rec;
  rec.counts = autodiff::make_tensor({2}, {4, 4});
  autodiff::Tape tape(false);
  CHECK(loss(tape, rec, 1, {1.0, 1.0})->item() == doctest::Approx(std::log(2.0)));
}

TEST_CASE("clone is deep") {
  const auto p = build(small_config(), 0);
  const auto q = p.clone();
  (*q.fc_w)[0] += 1.0;
  CHECK((*p.fc_w)[0] != (*q.fc_w)[0]);
}
