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


#ifndef EVCI_NN_ADAM_HPP_
#define EVCI_NN_ADAM_HPP_

#include <cstdint>
#include <vector>

#include "evci/nn/graph.hpp"

namespace evci::nn {

struct AdamOptions {
  double beta1 = 0.5;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Moment buffers for one ParameterSet, kept in parameter order.
template <typename T>
struct AdamState {
  AdamOptions options;
  std::uint64_t step = 0;
  std::vector<Tensor<T>> m;
  std::vector<Tensor<T>> v;

  explicit AdamState(const ParameterSet<T>& params, AdamOptions opt = {});
};

// One bias-corrected Adam update of every parameter from its accumulated
// gradient. Gradients are left untouched.
template <typename T>
void adam_step(ParameterSet<T>& params, AdamState<T>& state, double lr);

extern template struct AdamState<float>;
extern template struct AdamState<double>;

}  // namespace evci::nn

#endif  // EVCI_NN_ADAM_HPP_
