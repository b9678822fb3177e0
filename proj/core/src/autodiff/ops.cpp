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

#include "spikeguard/autodiff/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "spikeguard/errors.hpp"

namespace spikeguard::autodiff {
namespace {

void require_rank(const Tensor& t, std::size_t rank, const char* op, const char* name) {
  if (t.rank() != rank) {
    throw DimensionError(std::string(op) + ": " + name + " must have rank " +
                         std::to_string(rank) + ", got shape " + to_string(t.shape()));
  }
}

void require_axis(std::size_t got, std::size_t want, const char* op, const char* what) {
  if (got != want) {
    throw DimensionError(std::string(op) + ": " + what + " is " + std::to_string(got) +
                         ", expected " + std::to_string(want));
  }
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shape " + to_string(a.shape()) +
                         " does not match " + to_string(b.shape()));
  }
}

}  // namespace

void LifParams::validate() const {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw ConfigError("LIF decay beta must lie in (0, 1), got " + std::to_string(beta));
  }
  if (!(theta > 0.0)) {
    throw ConfigError("LIF threshold theta must be > 0, got " + std::to_string(theta));
  }
  if (!(sigma > 0.0)) {
    throw ConfigError("surrogate slope sigma must be > 0, got " + std::to_string(sigma));
  }
}

ConvWeight pack_conv_weight(Tape& tape, const TensorPtr& w) {
  require_rank(*w, 3, "conv1d", "weight");
  const std::size_t c_out = w->dim(0);
  const std::size_t row = w->dim(1) * w->dim(2);
  auto packed = make_tensor({row, c_out});
  const auto ws = w->data();
  auto ps = packed->data();
  for (std::size_t c = 0; c < c_out; ++c) {
    for (std::size_t r = 0; r < row; ++r) ps[r * c_out + c] = ws[c * row + r];
  }
  if (tape.should_record({w.get()})) {
    packed->set_requires_grad(true);
    tape.record({packed}, [w, packed, c_out, row]() {
      const auto gp = packed->grad();
      auto gw = w->grad();
      for (std::size_t c = 0; c < c_out; ++c) {
        for (std::size_t r = 0; r < row; ++r) gw[c * row + r] += gp[r * c_out + c];
      }
    });
  }
  return {w, packed};
}

TensorPtr conv1d(Tape& tape, const TensorPtr& x, const TensorPtr& w, const TensorPtr& b) {
  return conv1d(tape, x, pack_conv_weight(tape, w), b);
}

// Spike maps are mostly zero, so both the forward pass and the weight
// gradient walk the non-zero inputs only. Work is done in position-major
// layout ([L_out, C_out]) so every inner loop is a contiguous axpy.
TensorPtr conv1d(Tape& tape, const TensorPtr& x, const ConvWeight& cw, const TensorPtr& b) {
  const TensorPtr& w = cw.weight;
  const TensorPtr& wt = cw.packed;
  require_rank(*x, 2, "conv1d", "input");
  require_rank(*w, 3, "conv1d", "weight");
  require_rank(*b, 1, "conv1d", "bias");
  const std::size_t c_out = w->dim(0);
  const std::size_t c_in = w->dim(1);
  const std::size_t k = w->dim(2);
  const std::size_t len = x->dim(1);
  require_axis(x->dim(0), c_in, "conv1d", "input channel axis (0)");
  require_axis(b->dim(0), c_out, "conv1d", "bias axis (0)");
  require_axis(wt->size(), w->size(), "conv1d", "packed weight size");
  if (k == 0 || len < k) {
    throw DimensionError("conv1d: input length axis (1) is " + std::to_string(len) +
                         ", shorter than kernel " + std::to_string(k));
  }
  const std::size_t len_out = len - k + 1;
  const std::size_t row = c_in * k;

  // (packed row r = d * k + kk, output position i) pairs with a non-zero
  // input, grouped by r so a weight row is reused while it is in cache
  struct Tap {
    std::size_t r;
    std::size_t i;
    double v;
  };
  std::vector<Tap> taps;
  const auto xs = x->data();
  for (std::size_t d = 0; d < c_in; ++d) {
    for (std::size_t kk = 0; kk < k; ++kk) {
      for (std::size_t i = 0; i < len_out; ++i) {
        const double v = xs[d * len + i + kk];
        if (v != 0.0) taps.push_back({d * k + kk, i, v});
      }
    }
  }

  std::vector<double> acc(len_out * c_out);
  const auto bs = b->data();
  for (std::size_t i = 0; i < len_out; ++i) {
    std::copy(bs.begin(), bs.end(), acc.begin() + static_cast<std::ptrdiff_t>(i * c_out));
  }
  const double* wts = wt->data().data();
  for (const Tap& t : taps) {
    double* dst = acc.data() + t.i * c_out;
    const double* src = wts + t.r * c_out;
    for (std::size_t c = 0; c < c_out; ++c) dst[c] += t.v * src[c];
  }
  auto y = make_tensor({c_out, len_out});
  auto ys = y->data();
  for (std::size_t i = 0; i < len_out; ++i) {
    for (std::size_t c = 0; c < c_out; ++c) ys[c * len_out + i] = acc[i * c_out + c];
  }

  if (tape.should_record({x.get(), wt.get(), b.get()})) {
    y->set_requires_grad(true);
    tape.record({y}, [x, w, wt, b, y, taps = std::move(taps), c_out, c_in, k, len, len_out,
                      row]() {
      const auto gy = y->grad();
      std::vector<double> g_t(len_out * c_out);
      for (std::size_t c = 0; c < c_out; ++c) {
        for (std::size_t i = 0; i < len_out; ++i) g_t[i * c_out + c] = gy[c * len_out + i];
      }
      if (b->requires_grad()) {
        auto gb = b->grad();
        for (std::size_t i = 0; i < len_out; ++i) {
          for (std::size_t c = 0; c < c_out; ++c) gb[c] += g_t[i * c_out + c];
        }
      }
      if (wt->requires_grad()) {
        double* gwt = wt->grad().data();
        for (const Tap& t : taps) {
          double* dst = gwt + t.r * c_out;
          const double* src = g_t.data() + t.i * c_out;
          for (std::size_t c = 0; c < c_out; ++c) dst[c] += t.v * src[c];
        }
      }
      if (x->requires_grad()) {
        std::vector<double> col_grad(len_out * row, 0.0);
        const double* ws = w->data().data();
        for (std::size_t c = 0; c < c_out; ++c) {
          const double* wc = ws + c * row;
          for (std::size_t i = 0; i < len_out; ++i) {
            const double g = gy[c * len_out + i];
            if (g == 0.0) continue;
            double* cg = col_grad.data() + i * row;
            for (std::size_t r = 0; r < row; ++r) cg[r] += g * wc[r];
          }
        }
        auto gx = x->grad();
        for (std::size_t i = 0; i < len_out; ++i) {
          const double* cg = col_grad.data() + i * row;
          for (std::size_t d = 0; d < c_in; ++d) {
            for (std::size_t kk = 0; kk < k; ++kk) gx[d * len + i + kk] += cg[d * k + kk];
          }
        }
      }
    });
  }
  return y;
}

TensorPtr maxpool1d(Tape& tape, const TensorPtr& x) {
  require_rank(*x, 2, "maxpool1d", "input");
  const std::size_t channels = x->dim(0);
  const std::size_t len = x->dim(1);
  if (len < 2) {
    throw DimensionError("maxpool1d: length axis (1) must be >= 2, got " + std::to_string(len));
  }
  const std::size_t len_out = len / 2;
  auto y = make_tensor({channels, len_out});
  std::vector<std::size_t> argmax(channels * len_out);
  const auto xs = x->data();
  auto ys = y->data();
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t i = 0; i < len_out; ++i) {
      const std::size_t a = c * len + 2 * i;
      // ties keep the earlier index
      const std::size_t pick = xs[a + 1] > xs[a] ? a + 1 : a;
      ys[c * len_out + i] = xs[pick];
      argmax[c * len_out + i] = pick;
    }
  }
  if (tape.should_record({x.get()})) {
    y->set_requires_grad(true);
    tape.record({y}, [x, y, argmax = std::move(argmax)]() {
      const auto gy = y->grad();
      auto gx = x->grad();
      for (std::size_t o = 0; o < argmax.size(); ++o) gx[argmax[o]] += gy[o];
    });
  }
  return y;
}

TensorPtr linear(Tape& tape, const TensorPtr& x, const TensorPtr& w, const TensorPtr& b) {
  require_rank(*w, 2, "linear", "weight");
  require_rank(*b, 1, "linear", "bias");
  const std::size_t m = w->dim(0);
  const std::size_t n = w->dim(1);
  require_axis(x->size(), n, "linear", "input length (weight axis 1)");
  require_axis(b->dim(0), m, "linear", "bias axis (0)");

  auto y = make_tensor({m});
  const auto xs = x->data();
  const auto ws = w->data();
  const auto bs = b->data();
  auto ys = y->data();
  for (std::size_t r = 0; r < m; ++r) {
    const double* wr = ws.data() + r * n;
    double acc = bs[r];
    for (std::size_t c = 0; c < n; ++c) acc += wr[c] * xs[c];
    ys[r] = acc;
  }
  if (tape.should_record({x.get(), w.get(), b.get()})) {
    y->set_requires_grad(true);
    tape.record({y}, [x, w, b, y, m, n]() {
      const auto gy = y->grad();
      const auto xs = x->data();
      const auto ws = w->data();
      if (b->requires_grad()) {
        auto gb = b->grad();
        for (std::size_t r = 0; r < m; ++r) gb[r] += gy[r];
      }
      if (w->requires_grad()) {
        auto gw = w->grad();
        for (std::size_t r = 0; r < m; ++r) {
          const double g = gy[r];
          if (g == 0.0) continue;
          double* gwr = gw.data() + r * n;
          for (std::size_t c = 0; c < n; ++c) gwr[c] += g * xs[c];
        }
      }
      if (x->requires_grad()) {
        auto gx = x->grad();
        for (std::size_t r = 0; r < m; ++r) {
          const double g = gy[r];
          if (g == 0.0) continue;
          const double* wr = ws.data() + r * n;
          for (std::size_t c = 0; c < n; ++c) gx[c] += g * wr[c];
        }
      }
    });
  }
  return y;
}

TensorPtr reshape(Tape& tape, const TensorPtr& x, Shape shape) {
  if (numel(shape) != x->size()) {
    throw DimensionError("reshape: cannot view " + to_string(x->shape()) + " as " +
                         to_string(shape));
  }
  auto y = make_tensor(std::move(shape), x->values());
  if (tape.should_record({x.get()})) {
    y->set_requires_grad(true);
    tape.record({y}, [x, y]() {
      const auto gy = y->grad();
      auto gx = x->grad();
      for (std::size_t i = 0; i < gy.size(); ++i) gx[i] += gy[i];
    });
  }
  return y;
}

TensorPtr add(Tape& tape, const TensorPtr& a, const TensorPtr& b) {
  require_same_shape(*a, *b, "add");
  auto y = make_tensor(a->shape());
  auto ys = y->data();
  for (std::size_t i = 0; i < ys.size(); ++i) ys[i] = (*a)[i] + (*b)[i];
  if (tape.should_record({a.get(), b.get()})) {
    y->set_requires_grad(true);
    tape.record({y}, [a, b, y]() {
      const auto gy = y->grad();
      for (const auto& t : {a, b}) {
        if (!t->requires_grad()) continue;
        auto g = t->grad();
        for (std::size_t i = 0; i < gy.size(); ++i) g[i] += gy[i];
      }
    });
  }
  return y;
}

TensorPtr scale(Tape& tape, const TensorPtr& x, double factor) {
  auto y = make_tensor(x->shape());
  auto ys = y->data();
  for (std::size_t i = 0; i < ys.size(); ++i) ys[i] = (*x)[i] * factor;
  if (tape.should_record({x.get()})) {
    y->set_requires_grad(true);
    tape.record({y}, [x, y, factor]() {
      const auto gy = y->grad();
      auto gx = x->grad();
      for (std::size_t i = 0; i < gy.size(); ++i) gx[i] += gy[i] * factor;
    });
  }
  return y;
}

TensorPtr group_sum(Tape& tape, const TensorPtr& x, std::size_t groups) {
  if (groups == 0 || x->size() % groups != 0) {
    throw DimensionError("group_sum: " + std::to_string(x->size()) +
                         " elements do not split into " + std::to_string(groups) + " groups");
  }
  const std::size_t block = x->size() / groups;
  auto y = make_tensor({groups});
  for (std::size_t g = 0; g < groups; ++g) {
    double acc = 0.0;
    for (std::size_t i = 0; i < block; ++i) acc += (*x)[g * block + i];
    (*y)[g] = acc;
  }
  if (tape.should_record({x.get()})) {
    y->set_requires_grad(true);
    tape.record({y}, [x, y, block]() {
      const auto gy = y->grad();
      auto gx = x->grad();
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gy[i / block];
    });
  }
  return y;
}

double surrogate_grad(double u, const LifParams& p) {
  const double d = 1.0 + p.sigma * std::abs(u - p.theta);
  return 1.0 / (d * d);
}

Tensor surrogate_grad(const Tensor& u, const LifParams& p) {
  Tensor g(u.shape());
  for (std::size_t i = 0; i < u.size(); ++i) g[i] = surrogate_grad(u[i], p);
  return g;
}

LifOutput lif_step(Tape& tape, const TensorPtr& current, const TensorPtr& u_prev,
                   const TensorPtr& s_prev, const LifParams& p, SpikeFn spike_fn) {
  require_same_shape(*current, *u_prev, "lif_step");
  require_same_shape(*current, *s_prev, "lif_step");
  auto u = make_tensor(current->shape());
  auto s = make_tensor(current->shape());
  const std::size_t n = current->size();
  for (std::size_t i = 0; i < n; ++i) {
    const double v = p.beta * (*u_prev)[i] + (*current)[i] - (*s_prev)[i] * p.theta;
    (*u)[i] = v;
    if (spike_fn == SpikeFn::kHeaviside) {
      (*s)[i] = v >= p.theta ? 1.0 : 0.0;
    } else {
      const double d = v - p.theta;
      (*s)[i] = 0.5 + d / (1.0 + p.sigma * std::abs(d));
    }
  }
  if (tape.should_record({current.get(), u_prev.get(), s_prev.get()})) {
    u->set_requires_grad(true);
    s->set_requires_grad(true);
    tape.record({s, u}, [current, u_prev, s_prev, u, s, p, n]() {
      const auto gs = s->grad();
      const auto gu = u->grad();
      std::span<double> gi;
      std::span<double> gup;
      std::span<double> gsp;
      if (current->requires_grad()) gi = current->grad();
      if (u_prev->requires_grad()) gup = u_prev->grad();
      if (s_prev->requires_grad()) gsp = s_prev->grad();
      for (std::size_t i = 0; i < n; ++i) {
        const double du = gu[i] + gs[i] * surrogate_grad((*u)[i], p);
        if (!gi.empty()) gi[i] += du;
        if (!gup.empty()) gup[i] += p.beta * du;
        if (!gsp.empty()) gsp[i] -= p.theta * du;
      }
    });
  }
  return {s, u};
}

TensorPtr weighted_ce(Tape& tape, const TensorPtr& counts, int label, const Tensor& weights) {
  require_axis(counts->size(), 2, "weighted_ce", "count pair length");
  require_axis(weights.size(), 2, "weighted_ce", "weight pair length");
  if (label != 0 && label != 1) {
    throw InputError("weighted_ce: label must be 0 or 1, got " + std::to_string(label));
  }
  if (!(weights[0] > 0.0 && weights[1] > 0.0)) {
    throw InputError("weighted_ce: class weights must be positive");
  }
  const double c0 = (*counts)[0];
  const double c1 = (*counts)[1];
  const double top = std::max(c0, c1);
  const double lse = top + std::log(std::exp(c0 - top) + std::exp(c1 - top));
  const double w = weights[static_cast<std::size_t>(label)];
  const double c_label = label == 0 ? c0 : c1;
  auto y = make_scalar(w * (lse - c_label));
  if (tape.should_record({counts.get()})) {
    y->set_requires_grad(true);
    const double p0 = std::exp(c0 - lse);
    const double p1 = std::exp(c1 - lse);
    tape.record({y}, [counts, y, label, w, p0, p1]() {
      const double g = y->grad()[0];
      auto gc = counts->grad();
      gc[0] += g * w * (p0 - (label == 0 ? 1.0 : 0.0));
      gc[1] += g * w * (p1 - (label == 1 ? 1.0 : 0.0));
    });
  }
  return y;
}

}  // namespace spikeguard::autodiff
