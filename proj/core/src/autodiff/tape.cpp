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

#include "spikeguard/autodiff/tape.hpp"

#include "spikeguard/errors.hpp"

namespace spikeguard::autodiff {

bool Tape::should_record(std::initializer_list<const Tensor*> operands) const noexcept {
  if (!enabled_) return false;
  for (const Tensor* t : operands) {
    if (t != nullptr && t->requires_grad()) return true;
  }
  return false;
}

void Tape::record(std::vector<TensorPtr> outputs, BackwardFn backward) {
  nodes_.push_back(Node{std::move(outputs), std::move(backward)});
}

void backward(Tape& tape, Tensor& seed) {
  if (tape.nodes_.empty()) return;
  if (seed.size() != 1) {
    throw DimensionError("backward seed must be a scalar, got shape " + to_string(seed.shape()));
  }
  for (auto& node : tape.nodes_) {
    for (auto& out : node.outputs) out->zero_grad();
  }
  seed.grad()[0] = 1.0;
  for (auto it = tape.nodes_.rbegin(); it != tape.nodes_.rend(); ++it) it->backward();
}

}  // namespace spikeguard::autodiff
