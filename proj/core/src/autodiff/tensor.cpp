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

#include "spikeguard/autodiff/tensor.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>

#include "spikeguard/errors.hpp"

namespace spikeguard::autodiff {

std::size_t numel(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string to_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ", ";
    os << shape[i];
  }
  os << ']';
  return os.str();
}

Tensor::Tensor(Shape shape, bool requires_grad)
    : shape_(std::move(shape)), data_(numel(shape_), 0.0), requires_grad_(requires_grad) {}

Tensor::Tensor(Shape shape, std::vector<double> data, bool requires_grad)
    : shape_(std::move(shape)), data_(std::move(data)), requires_grad_(requires_grad) {
  if (numel(shape_) != data_.size()) {
    throw DimensionError("tensor shape " + to_string(shape_) + " holds " +
                         std::to_string(numel(shape_)) + " elements but " +
                         std::to_string(data_.size()) + " values were given");
  }
}

double Tensor::item() const {
  if (data_.size() != 1) {
    throw DimensionError("item() on tensor of shape " + to_string(shape_));
  }
  return data_[0];
}

std::span<double> Tensor::grad() {
  if (grad_.size() != data_.size()) grad_.assign(data_.size(), 0.0);
  return grad_;
}

void Tensor::zero_grad() {
  if (grad_.size() != data_.size()) {
    grad_.assign(data_.size(), 0.0);
  } else {
    std::fill(grad_.begin(), grad_.end(), 0.0);
  }
}

TensorPtr make_tensor(Shape shape, bool requires_grad) {
  return std::make_shared<Tensor>(std::move(shape), requires_grad);
}

TensorPtr make_tensor(Shape shape, std::vector<double> data, bool requires_grad) {
  return std::make_shared<Tensor>(std::move(shape), std::move(data), requires_grad);
}

TensorPtr make_scalar(double value, bool requires_grad) {
  return std::make_shared<Tensor>(Shape{1}, std::vector<double>{value}, requires_grad);
}

}  // namespace spikeguard::autodiff
