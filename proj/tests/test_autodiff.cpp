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

#include "spikeguard/autodiff/adam.hpp"
#include "spikeguard/autodiff/ops.hpp"
#include "spikeguard/errors.hpp"
#include "support/oracles.hpp"

using namespace spikeguard;
using namespace spikeguard::autodiff;
using testing_support::central_diff;
using testing_support::rel_err;

namespace {

TensorPtr random_tensor(Shape shape, std::mt19937_64& rng, bool grad = true) {
  std::normal_distribution<double> n(0.0, 1.0);
  auto t = make_tensor(std::move(shape), grad);
  for (double& v : t->data()) v = n(rng);
  return t;
}

/// Sum of y weighted by fixed random coefficients, so every output entry
/// carries a distinct gradient.
TensorPtr probe_sum(Tape& tape, const TensorPtr& y, const std::vector<double>& coeff) {
  auto flat = reshape(tape, y, {y->size()});
  auto w = make_tensor({1, y->size()}, coeff);
  auto b = make_tensor({1});
  return linear(tape, flat, w, b);
}

void check_grad(const std::vector<TensorPtr>& inputs,
                const std::function<TensorPtr(Tape&)>& build, double tol) {
  Tape tape;
  auto out = build(tape);
  for (const auto& t : inputs) t->zero_grad();
  backward(tape, out);
  for (const auto& t : inputs) {
    const std::vector<double> analytic(t->grad().begin(), t->grad().end());
    const auto numeric = central_diff(t->data(), [&] {
      Tape off(false);
      return build(off)->item();
    });
    for (std::size_t i = 0; i < analytic.size(); ++i) {
      CHECK(rel_err(analytic[i], numeric[i], 1e-6) < tol);
    }
  }
}

}  // namespace

TEST_CASE("tensor shape invariants") {
  Tensor t({2, 3});
  CHECK(t.size() == 6);
  CHECK(numel({2, 3, 4}) == 24);
  CHECK_THROWS_AS(Tensor({2, 2}, {1.0, 2.0, 3.0}), DimensionError);
  CHECK_FALSE(t.has_grad());
  CHECK(t.grad().size() == 6);
  CHECK(to_string({2, 3}) == "[2, 3]");
  CHECK_THROWS_AS(t.item(), DimensionError);
}

TEST_CASE("conv1d examples") {
  Tape tape;
  auto x = make_tensor({1, 3}, {1, 2, 4});
  auto w = make_tensor({1, 1, 2}, {1, -1});
  auto b = make_scalar(0);
  auto y = conv1d(tape, x, w, b);
  CHECK(y->shape() == Shape{1, 2});
  CHECK((*y)[0] == -1.0);
  CHECK((*y)[1] == -2.0);

  auto zero = make_tensor({1, 3});
  auto w2 = make_tensor({1, 1, 2}, {0.3, 7.0});
  auto y0 = conv1d(tape, zero, w2, b);
  CHECK((*y0)[0] == 0.0);
  CHECK((*y0)[1] == 0.0);
}

TEST_CASE("conv1d matches a direct sum") {
  std::mt19937_64 rng(11);
  auto x = random_tensor({3, 7}, rng, false);
  (*x)[4] = 0.0;
  auto w = random_tensor({4, 3, 2}, rng, false);
  auto b = random_tensor({4}, rng, false);
  Tape tape(false);
  auto y = conv1d(tape, x, w, b);
  for (std::size_t c = 0; c < 4; ++c) {
    for (std::size_t i = 0; i < 6; ++i) {
      double ref = (*b)[c];
      for (std::size_t d = 0; d < 3; ++d) {
        for (std::size_t k = 0; k < 2; ++k) ref += (*w)[(c * 3 + d) * 2 + k] * (*x)[d * 7 + i + k];
      }
      CHECK((*y)[c * 6 + i] == doctest::Approx(ref).epsilon(1e-13));
    }
  }
}

TEST_CASE("conv1d shape errors name the axis") {
  Tape tape;
  auto x = make_tensor({2, 5});
  auto w = make_tensor({3, 1, 2});
  auto b = make_tensor({3});
  try {
    conv1d(tape, x, w, b);
    FAIL("expected a dimension error");
  } catch (const DimensionError& e) {
    CHECK(std::string(e.what()).find("axis") != std::string::npos);
  }
  auto short_x = make_tensor({1, 1});
  auto w1 = make_tensor({3, 1, 2});
  CHECK_THROWS_AS(conv1d(tape, short_x, w1, b), DimensionError);
}

TEST_CASE("conv1d gradient vs finite differences") {
  std::mt19937_64 rng(3);
  auto x = random_tensor({2, 6}, rng);
  (*x)[3] = 0.0;  // exercises the sparse path
  auto w = random_tensor({3, 2, 2}, rng);
  auto b = random_tensor({3}, rng);
  std::vector<double> coeff(15);
  std::normal_distribution<double> n(0.0, 1.0);
  for (double& c : coeff) c = n(rng);
  check_grad({x, w, b}, [&](Tape& t) { return probe_sum(t, conv1d(t, x, w, b), coeff); }, 1e-6);
}

TEST_CASE("packed conv weight reused across calls accumulates into the weight") {
  std::mt19937_64 rng(8);
  auto x1 = random_tensor({2, 4}, rng);
  auto x2 = random_tensor({2, 4}, rng);
  auto w = random_tensor({3, 2, 2}, rng);
  auto b = random_tensor({3}, rng);
  std::vector<double> coeff(18, 0.0);
  std::normal_distribution<double> n(0.0, 1.0);
  for (double& c : coeff) c = n(rng);
  auto build = [&](Tape& t) {
    auto packed = pack_conv_weight(t, w);
    auto y = add(t, conv1d(t, x1, packed, b), conv1d(t, x2, packed, b));
    std::vector<double> c9(coeff.begin(), coeff.begin() + 9);
    return probe_sum(t, y, c9);
  };
  check_grad({x1, x2, w, b}, build, 1e-6);
}

TEST_CASE("maxpool1d examples") {
  Tape tape;
  auto x = make_tensor({1, 4}, {3, 1, 2, 5});
  auto y = maxpool1d(tape, x);
  CHECK(y->values() == std::vector<double>{3, 5});

  auto odd = make_tensor({1, 3}, {7, 2, 9});
  CHECK(maxpool1d(tape, odd)->values() == std::vector<double>{7});

  auto tie = make_tensor({1, 2}, {1, 1}, true);
  Tape t2;
  auto yt = maxpool1d(t2, tie);
  auto s = group_sum(t2, yt, 1);
  backward(t2, s);
  CHECK(tie->grad()[0] == 1.0);
  CHECK(tie->grad()[1] == 0.0);

  CHECK_THROWS_AS(maxpool1d(tape, make_tensor({2, 1})), DimensionError);
}

TEST_CASE("maxpool1d gradient vs finite differences away from ties") {
  std::mt19937_64 rng(5);
  auto x = random_tensor({3, 7}, rng);
  std::vector<double> coeff(9, 0.0);
  std::normal_distribution<double> n(0.0, 1.0);
  for (double& c : coeff) c = n(rng);
  check_grad({x}, [&](Tape& t) { return probe_sum(t, maxpool1d(t, x), coeff); }, 1e-6);
}

TEST_CASE("linear examples and gradient") {
  Tape tape;
  auto y = linear(tape, make_tensor({2}, {1, 0}), make_tensor({1, 2}, {2, 3}), make_scalar(1));
  CHECK(y->item() == 3.0);
  auto b = make_tensor({2}, {0.5, -4});
  CHECK(linear(tape, make_tensor({3}), make_tensor({2, 3}, {1, 2, 3, 4, 5, 6}), b)->values() ==
        b->values());
  CHECK_THROWS_AS(linear(tape, make_tensor({4}), make_tensor({2, 3}), b), DimensionError);

  std::mt19937_64 rng(9);
  auto x = random_tensor({2, 3}, rng);  // any shape with the right element count
  auto w = random_tensor({4, 6}, rng);
  auto bb = random_tensor({4}, rng);
  std::vector<double> coeff = {0.3, -1.2, 0.7, 2.0};
  check_grad({x, w, bb}, [&](Tape& t) { return probe_sum(t, linear(t, x, w, bb), coeff); }, 1e-6);
}

TEST_CASE("lif_step examples") {
  Tape tape(false);
  const LifParams p{0.9, 1.0, 10.0};
  auto step = [&](double i, double u, double s) {
    return lif_step(tape, make_scalar(i), make_scalar(u), make_scalar(s), p);
  };
  auto a = step(0.2, 0.5, 0.0);
  CHECK(std::abs(a.membrane->item() - 0.65) < 1e-12);
  CHECK(a.spikes->item() == 0.0);
  auto b = step(0.6, 0.5, 0.0);
  CHECK(std::abs(b.membrane->item() - 1.05) < 1e-12);
  CHECK(b.spikes->item() == 1.0);
  auto c = step(0.0, 1.0, 1.0);
  CHECK(std::abs(c.membrane->item() - (-0.1)) < 1e-12);
  CHECK(c.spikes->item() == 0.0);
}

TEST_CASE("lif_step spikes at exactly theta") {
  Tape tape(false);
  auto out = lif_step(tape, make_scalar(1.0), make_tensor({1}), make_tensor({1}),
                      LifParams{0.5, 1.0, 10.0});
  CHECK(out.spikes->item() == 1.0);
}

TEST_CASE("membrane chain derivative is beta") {
  // two steps of one neuron with no reset involved: du2/du1 = beta exactly
  const LifParams p{0.7, 100.0, 10.0};
  auto u0 = make_scalar(0.3, true);
  auto s0 = make_tensor({1});
  Tape tape;
  auto first = lif_step(tape, make_scalar(0.1), u0, s0, p);
  auto second = lif_step(tape, make_scalar(0.1), first.membrane, make_tensor({1}), p);
  // seed on the membrane only, so the surrogate never enters
  auto seed = linear(tape, second.membrane, make_tensor({1, 1}, std::vector<double>{1.0}), make_tensor({1}));
  backward(tape, seed);
  CHECK(u0->grad()[0] == doctest::Approx(0.7 * 0.7).epsilon(1e-15));
  CHECK(first.membrane->grad()[0] == doctest::Approx(0.7).epsilon(1e-15));
}

TEST_CASE("surrogate_grad examples") {
  const LifParams p{0.9, 1.0, 10.0};
  CHECK(surrogate_grad(1.0, p) == 1.0);
  CHECK(surrogate_grad(1.1, p) == doctest::Approx(0.25).epsilon(1e-12));
  for (double d : {0.01, 0.3, 2.0}) CHECK(surrogate_grad(1.0 + d, p) == surrogate_grad(1.0 - d, p));
  const Tensor u({3}, {1.0, 1.1, 0.9});
  const Tensor g = surrogate_grad(u, p);
  CHECK(g[0] == 1.0);
  CHECK(g[1] == doctest::Approx(0.25));
}

TEST_CASE("lif_step gradient with the smooth spike matches finite differences") {
  std::mt19937_64 rng(21);
  const LifParams p{0.8, 0.6, 3.0};
  auto i1 = random_tensor({5}, rng);
  auto i2 = random_tensor({5}, rng);
  auto u0 = random_tensor({5}, rng);
  std::vector<double> coeff = {1.0, -0.5, 0.25, 2.0, -1.5};
  auto build = [&](Tape& t) {
    auto a = lif_step(t, i1, u0, make_tensor({5}), p, SpikeFn::kSmooth);
    auto b = lif_step(t, i2, a.membrane, a.spikes, p, SpikeFn::kSmooth);
    return probe_sum(t, add(t, b.spikes, scale(t, b.membrane, 0.3)), coeff);
  };
  check_grad({i1, i2, u0}, build, 1e-6);
}

TEST_CASE("weighted_ce examples") {
  Tape tape(false);
  for (double c : {0.0, 3.0, 17.0}) {
    auto l = weighted_ce(tape, make_tensor({2}, {c, c}), 0, Tensor({2}, {1, 1}));
    CHECK(l->item() == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  }
  auto l9 = weighted_ce(tape, make_tensor({2}, {0, 0}), 1, Tensor({2}, {1, 9}));
  CHECK(l9->item() == doctest::Approx(9.0 * std::log(2.0)).epsilon(1e-14));
  CHECK(l9->item() == doctest::Approx(6.2383).epsilon(1e-4));
  CHECK_THROWS_AS(weighted_ce(tape, make_tensor({2}), 2, Tensor({2}, {1, 1})), InputError);
  CHECK_THROWS_AS(weighted_ce(tape, make_tensor({2}), 0, Tensor({2}, {0, 1})), InputError);
  // large counts stay finite
  auto big = weighted_ce(tape, make_tensor({2}, {900, 0}), 1, Tensor({2}, {1, 1}));
  CHECK(big->item() == doctest::Approx(900.0));
}

TEST_CASE("weighted_ce gradient vs finite differences") {
  for (int label : {0, 1}) {
    auto counts = make_tensor({2}, {3.5, 1.25}, true);
    const Tensor w({2}, {0.7, 4.0});
    check_grad({counts}, [&](Tape& t) { return weighted_ce(t, counts, label, w); }, 1e-6);
  }
}

TEST_CASE("backward basics") {
  auto x = make_scalar(3.0, true);
  {
    Tape tape;
    auto y = scale(tape, x, 2.0);
    backward(tape, y);
    CHECK(x->grad()[0] == 2.0);
  }
  x->zero_grad();
  {
    Tape tape;
    auto y = add(tape, x, x);
    backward(tape, y);
    CHECK(x->grad()[0] == 2.0);
  }
  {
    Tape empty;
    auto z = make_scalar(1.0, true);
    backward(empty, z);
    CHECK_FALSE(z->has_grad());
  }
  {
    Tape tape;
    auto v = make_tensor({2}, {1, 2}, true);
    auto y = scale(tape, v, 2.0);
    CHECK_THROWS_AS(backward(tape, y), DimensionError);
  }
}

TEST_CASE("backward twice doubles leaf gradients") {
  std::mt19937_64 rng(4);
  auto x = random_tensor({1, 5}, rng);
  auto w = random_tensor({2, 1, 2}, rng);
  auto b = random_tensor({2}, rng);
  Tape tape;
  auto y = probe_sum(tape, maxpool1d(tape, conv1d(tape, x, w, b)), {1.0, -2.0, 0.5, 0.25});
  backward(tape, y);
  const std::vector<double> once(w->grad().begin(), w->grad().end());
  const std::vector<double> xonce(x->grad().begin(), x->grad().end());
  backward(tape, y);
  for (std::size_t i = 0; i < once.size(); ++i) CHECK(w->grad()[i] == 2.0 * once[i]);
  for (std::size_t i = 0; i < xonce.size(); ++i) CHECK(x->grad()[i] == 2.0 * xonce[i]);
}

TEST_CASE("disabled tape and frozen operands record nothing") {
  Tape off(false);
  auto x = make_tensor({2}, {1, 2}, true);
  scale(off, x, 3.0);
  CHECK(off.empty());
  Tape on;
  scale(on, make_tensor({2}, {1, 2}), 3.0);
  CHECK(on.empty());
  scale(on, x, 3.0);
  CHECK(on.size() == 1);
}

TEST_CASE("forward determinism") {
  std::mt19937_64 rng(13);
  auto x = random_tensor({4, 9}, rng, false);
  auto w = random_tensor({6, 4, 2}, rng, false);
  auto b = random_tensor({6}, rng, false);
  Tape t1(false);
  Tape t2(false);
  CHECK(conv1d(t1, x, w, b)->values() == conv1d(t2, x, w, b)->values());
}

TEST_CASE("adam first step is about -lr") {
  for (double g : {0.3, -2.0, 1e-3}) {
    auto p = make_scalar(1.0, true);
    p->grad()[0] = g;
    AdamState st;
    const TensorPtr params[] = {p};
    adam_step(params, st, AdamConfig{0.01, 0.97, 0.99, 1.0, 1e-8});
    const double delta = p->item() - 1.0;
    CHECK(delta == doctest::Approx(-0.01 * (g > 0 ? 1.0 : -1.0)).epsilon(1e-4));
  }
}

TEST_CASE("adam with zero gradient") {
  auto p = make_tensor({3}, {1.0, -2.0, 0.5}, true);
  p->zero_grad();
  AdamState st;
  const TensorPtr params[] = {p};
  adam_step(params, st, AdamConfig{1e-3, 0.98, 0.98, 1.0, 1e-8});
  CHECK(p->values() == std::vector<double>{1.0, -2.0, 0.5});
  adam_step(params, st, AdamConfig{1e-3, 0.98, 0.98, 0.95, 1e-8});
  CHECK((*p)[0] == doctest::Approx(0.95).epsilon(1e-15));
  CHECK((*p)[1] == doctest::Approx(-1.9).epsilon(1e-15));
  CHECK(st.step == 2);
}

TEST_CASE("adam matches a scalar re-implementation over several steps") {
  const AdamConfig cfg{5e-3, 0.97, 0.99, 0.99, 1e-8};
  auto p = make_scalar(0.4, true);
  AdamState st;
  const TensorPtr params[] = {p};
  double x = 0.4, m = 0.0, v = 0.0;
  const double grads[] = {0.5, -0.2, 0.9, 0.0, 1.5};
  for (int t = 1; t <= 5; ++t) {
    const double g = grads[t - 1];
    p->grad()[0] = g;
    adam_step(params, st, cfg);
    m = cfg.beta1 * m + (1 - cfg.beta1) * g;
    v = cfg.beta2 * v + (1 - cfg.beta2) * g * g;
    const double mh = m / (1 - std::pow(cfg.beta1, t));
    const double vh = v / (1 - std::pow(cfg.beta2, t));
    x = cfg.weight * x - cfg.lr * mh / (std::sqrt(vh) + cfg.eps);
    CHECK(p->item() == doctest::Approx(x).epsilon(1e-14));
  }
}

TEST_CASE("lif params validation") {
  CHECK_NOTHROW(LifParams{0.5, 1.0, 10.0}.validate());
  CHECK_THROWS_AS((LifParams{1.0, 1.0, 10.0}.validate()), ConfigError);
  CHECK_THROWS_AS((LifParams{0.5, 0.0, 10.0}.validate()), ConfigError);
  CHECK_THROWS_AS((LifParams{0.5, 1.0, -1.0}.validate()), ConfigError);
}
