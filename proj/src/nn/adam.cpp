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


#include "evci/nn/adam.hpp"

#include <cmath>

#include "evci/error.hpp"

namespace evci::nn {

template <typename T>
AdamState<T>::AdamState(const ParameterSet<T>& params, AdamOptions opt)
    : options(opt) {
  for (const auto& p : params.items()) {
    m.emplace_back(p.value.shape());
    v.emplace_back(p.value.shape());
  }
}

template <typename T>
void adam_step(ParameterSet<T>& params, AdamState<T>& state, double lr) {
  auto& items = params.items();
  if (items.size() != state.m.size()) {
    throw ShapeError("adam state tracks " + std::to_string(state.m.size()) +
                     " parameters, set has " + std::to_string(items.size()));
  }
  ++state.step;
  const double b1 = state.options.beta1;
  const double b2 = state.options.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  for (std::size_t k = 0; k < items.size(); ++k) {
    Parameter<T>& p = items[k];
    Tensor<T>& m = state.m[k];
    Tensor<T>& v = state.v[k];
    if (p.grad.shape() != p.value.shape() || m.shape() != p.value.shape()) {
      throw ShapeError("adam shape mismatch for parameter '" + p.name + "'");
    }
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double g = p.grad[i];
      const double mi = b1 * m[i] + (1.0 - b1) * g;
      const double vi = b2 * v[i] + (1.0 - b2) * g * g;
      m[i] = static_cast<T>(mi);
      v[i] = static_cast<T>(vi);
      const double update = lr * (mi / c1) / (std::sqrt(vi / c2) + state.options.eps);
      p.value[i] = static_cast<T>(p.value[i] - update);
    }
  }
}

template struct AdamState<float>;
template struct AdamState<double>;
template void adam_step<float>(ParameterSet<float>&, AdamState<float>&, double);
template void adam_step<double>(ParameterSet<double>&, AdamState<double>&, double);

}  // namespace evci::nn
