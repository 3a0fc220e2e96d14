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


#ifndef EVCI_ENTGAN_MODEL_HPP_
#define EVCI_ENTGAN_MODEL_HPP_

#include <cstddef>
#include <string>
#include <unordered_map>

#include "evci/entgan/config.hpp"
#include "evci/envvec.hpp"
#include "evci/image.hpp"
#include "evci/nn/graph.hpp"
#include "evci/rng.hpp"

namespace evci::gan {

using nn::Graph;
using nn::Parameter;
using nn::ParameterSet;
using nn::Tensor;
using nn::Var;

// Maps parameters onto graph leaves, once per graph. Frozen binders emit
// constants, so no gradient work is spent on those parameters.
template <typename T>
class Binder {
 public:
  Binder(Graph<T>& g, bool trainable) : graph_(g), trainable_(trainable) {}

  Graph<T>& graph() { return graph_; }
  bool trainable() const { return trainable_; }

  Var operator()(Parameter<T>& p);

 private:
  Graph<T>& graph_;
  bool trainable_;
  std::unordered_map<const Parameter<T>*, Var> bound_;
};

enum class Scale { kFull, kHalf };

// Content encoder, environment-conditioned generator and the two patch
// discriminators. Encoder and generator parameters share one set since they
// are optimized jointly.
template <typename T>
class EntGan {
 public:
  // Fan-in scaled Gaussian weights, zero biases.
  EntGan(ModelConfig cfg, Rng& rng);

  const ModelConfig& config() const { return cfg_; }
  ParameterSet<T>& eg_params() { return eg_; }
  const ParameterSet<T>& eg_params() const { return eg_; }
  ParameterSet<T>& d_params() { return d_; }
  const ParameterSet<T>& d_params() const { return d_; }

  // image: [N, 3, H, W] with H, W divisible by 4 -> [N, 4C, H/4, W/4].
  Var encode(Binder<T>& b, Var image);
  // content: [N, 4C, h, w], env: [N, 3] -> image [N, 3, 4h, 4w] in [0, 1].
  Var generate(Binder<T>& b, Var content, Var env);
  // Patch score map. kHalf average-pools the input by 2 first.
  Var discriminate(Binder<T>& b, Var image, Scale scale);

  Tensor<T> encode_content(const Image& img);
  Tensor<T> generate(const Tensor<T>& content, const env::EnvVector& e);
  // G(E_c(img), e). Dimensions must be divisible by 4.
  Image translate(const Image& img, const env::EnvVector& e);

 private:
  Var conv(Binder<T>& b, ParameterSet<T>& set, const std::string& name, Var x,
           std::size_t stride, std::size_t padding, bool bias);
  Var discriminator(Binder<T>& b, const std::string& prefix, Var x);

  ModelConfig cfg_;
  ParameterSet<T> eg_;
  ParameterSet<T> d_;
};

// [1, 3] tensor holding an environment vector.
template <typename T>
Tensor<T> env_tensor(const env::EnvVector& e);

extern template class Binder<float>;
extern template class Binder<double>;
extern template class EntGan<float>;
extern template class EntGan<double>;

}  // namespace evci::gan

#endif  // EVCI_ENTGAN_MODEL_HPP_
