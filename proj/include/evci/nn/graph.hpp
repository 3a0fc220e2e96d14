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

#ifndef EVCI_NN_GRAPH_HPP_
#define EVCI_NN_GRAPH_HPP_

#include <cstddef>
#include <deque>
#include <functional>
#include <initializer_list>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "evci/nn/tensor.hpp"

namespace evci::nn {

// A named trainable array and its gradient accumulator.
template <typename T>
struct Parameter {
  std::string name;
  Tensor<T> value;
  Tensor<T> grad;

  void zero_grad() { grad = Tensor<T>(value.shape()); }
};

// Ordered collection of parameters. References stay valid as parameters are
// added.
template <typename T>
class ParameterSet {
 public:
  Parameter<T>& add(std::string name, Tensor<T> value);

  Parameter<T>& at(std::string_view name);
  const Parameter<T>& at(std::string_view name) const;
  bool contains(std::string_view name) const;

  std::deque<Parameter<T>>& items() noexcept { return items_; }
  const std::deque<Parameter<T>>& items() const noexcept { return items_; }
  std::size_t size() const noexcept { return items_.size(); }
  std::size_t scalar_count() const;

  void zero_grad();

 private:
  std::deque<Parameter<T>> items_;
};

// Handle to a node in a Graph.
struct Var {
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::size_t id = kNone;

  bool valid() const noexcept { return id != kNone; }
};

// Reverse-mode tape. Nodes are recorded in evaluation order; `backward`
// walks them in reverse. A node requires a gradient iff one of its inputs
// does, and only such nodes keep their backward closure.
template <typename T>
class Graph {
 public:
  using BackwardFn = std::function<void(Graph&, std::size_t self)>;

  // Leaf without gradient.
  Var constant(Tensor<T> value);
  // Leaf whose gradient can be read back with grad().
  Var variable(Tensor<T> value);
  // Leaf bound to a parameter; backward() adds the gradient into p.grad.
  Var parameter(Parameter<T>& p);

  Var record(Tensor<T> value, std::initializer_list<Var> inputs,
             BackwardFn backward);
  Var record(Tensor<T> value, const std::vector<Var>& inputs,
             BackwardFn backward);

  const Tensor<T>& value(Var v) const { return nodes_.at(v.id).value; }
  bool requires_grad(Var v) const { return nodes_.at(v.id).requires_grad; }
  // Gradient after backward(); zeros for nodes the root does not reach.
  Tensor<T> grad(Var v) const;

  // For backward closures: gradient flowing into node `self`, and the
  // (lazily zero-initialized) accumulator of an input.
  const Tensor<T>& output_grad(std::size_t self) const {
    return nodes_[self].grad;
  }
  Tensor<T>& grad_buffer(Var v);

  // Seeds d(root)/d(root) = 1. The root must hold exactly one value.
  void backward(Var root);

  std::size_t size() const noexcept { return nodes_.size(); }

 private:
  struct Node {
    Tensor<T> value;
    Tensor<T> grad;
    bool requires_grad = false;
    BackwardFn backward;
    Parameter<T>* param = nullptr;
  };

  std::vector<Node> nodes_;
};

extern template class ParameterSet<float>;
extern template class ParameterSet<double>;
extern template class Graph<float>;
extern template class Graph<double>;

}  // namespace evci::nn

#endif  // EVCI_NN_GRAPH_HPP_
