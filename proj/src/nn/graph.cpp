// Copyright 2026 The EVCI Augment Authors. All Rights Reserved.
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

#include "evci/nn/graph.hpp"

#include <algorithm>

#include "evci/error.hpp"

namespace evci::nn {

template <typename T>
Parameter<T>& ParameterSet<T>::add(std::string name, Tensor<T> value) {
  if (contains(name)) throw ArgumentError("duplicate parameter '" + name + "'");
  Parameter<T> p{std::move(name), std::move(value), {}};
  p.zero_grad();
  items_.push_back(std::move(p));
  return items_.back();
}

template <typename T>
Parameter<T>& ParameterSet<T>::at(std::string_view name) {
  for (auto& p : items_) {
    if (p.name == name) return p;
  }
  throw ArgumentError("no parameter named '" + std::string(name) + "'");
}

template <typename T>
const Parameter<T>& ParameterSet<T>::at(std::string_view name) const {
  for (const auto& p : items_) {
    if (p.name == name) return p;
  }
  throw ArgumentError("no parameter named '" + std::string(name) + "'");
}

template <typename T>
bool ParameterSet<T>::contains(std::string_view name) const {
  return std::any_of(items_.begin(), items_.end(),
                     [&](const Parameter<T>& p) { return p.name == name; });
}

template <typename T>
std::size_t ParameterSet<T>::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : items_) n += p.value.size();
  return n;
}

template <typename T>
void ParameterSet<T>::zero_grad() {
  for (auto& p : items_) p.zero_grad();
}

template <typename T>
Var Graph<T>::constant(Tensor<T> value) {
  Node n;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

template <typename T>
Var Graph<T>::variable(Tensor<T> value) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = true;
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

template <typename T>
Var Graph<T>::parameter(Parameter<T>& p) {
  Node n;
  n.value = p.value;
  n.requires_grad = true;
  n.param = &p;
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

template <typename T>
Var Graph<T>::record(Tensor<T> value, std::initializer_list<Var> inputs,
                     BackwardFn backward) {
  return record(std::move(value), std::vector<Var>(inputs), std::move(backward));
}

template <typename T>
Var Graph<T>::record(Tensor<T> value, const std::vector<Var>& inputs,
                     BackwardFn backward) {
  Node n;
  n.value = std::move(value);
  for (const Var& v : inputs) {
    if (v.valid() && nodes_.at(v.id).requires_grad) n.requires_grad = true;
  }
  if (n.requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

template <typename T>
Tensor<T> Graph<T>::grad(Var v) const {
  const Node& n = nodes_.at(v.id);
  if (n.grad.empty()) return Tensor<T>(n.value.shape());
  return n.grad;
}

template <typename T>
Tensor<T>& Graph<T>::grad_buffer(Var v) {
  Node& n = nodes_.at(v.id);
  if (n.grad.empty()) n.grad = Tensor<T>(n.value.shape());
  return n.grad;
}

template <typename T>
void Graph<T>::backward(Var root) {
  Node& r = nodes_.at(root.id);
  if (r.value.size() != 1) {
    throw ShapeError("backward needs a scalar root, got shape " +
                     shape_string(r.value.shape()));
  }
  if (!r.requires_grad) return;
  grad_buffer(root)[0] += T{1};
  for (std::size_t i = root.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.requires_grad || n.grad.empty()) continue;
    if (n.backward) n.backward(*this, i);
    if (n.param != nullptr) n.param->grad.accumulate(n.grad);
  }
}

template class ParameterSet<float>;
template class ParameterSet<double>;
template class Graph<float>;
template class Graph<double>;

}  // namespace evci::nn
