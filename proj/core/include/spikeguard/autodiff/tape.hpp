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

#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "spikeguard/autodiff/tensor.hpp"

namespace spikeguard::autodiff {

/// Linear record of differentiable operations. Each node owns the tensors
/// its backward rule needs; replaying the nodes in reverse order is a valid
/// reverse topological traversal because operands are always recorded
/// before the nodes that consume them.
///
/// A tape is single-threaded. Independent tapes may run concurrently as
/// long as they do not share tensors that require gradients.
class Tape {
 public:
  using BackwardFn = std::function<void()>;

  Tape() = default;
  explicit Tape(bool enabled) : enabled_(enabled) {}

  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;
  Tape(Tape&&) = default;
  Tape& operator=(Tape&&) = default;

  /// A disabled tape records nothing; ops still compute forward values.
  bool enabled() const noexcept { return enabled_; }

  /// True when an op with these operands must be recorded.
  bool should_record(std::initializer_list<const Tensor*> operands) const noexcept;

  /// Appends a node. `outputs` are the tensors produced by the op; their
  /// gradient buffers are cleared at the start of every backward pass.
  void record(std::vector<TensorPtr> outputs, BackwardFn backward);

  std::size_t size() const noexcept { return nodes_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }
  void clear() noexcept { nodes_.clear(); }

 private:
  friend void backward(Tape& tape, Tensor& seed);

  struct Node {
    std::vector<TensorPtr> outputs;
    BackwardFn backward;
  };

  std::vector<Node> nodes_;
  bool enabled_ = true;
};

/// Seeds d(seed)/d(seed) = 1 and replays the tape in reverse. Leaf tensors
/// (those not produced by a recorded op) accumulate into their existing
/// gradient buffers, so two calls without zeroing double every leaf
/// gradient. Intermediate buffers are reset on every call. An empty tape
/// is a no-op.
void backward(Tape& tape, Tensor& seed);

inline void backward(Tape& tape, const TensorPtr& seed) { backward(tape, *seed); }

}  // namespace spikeguard::autodiff
