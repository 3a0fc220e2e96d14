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


#ifndef EVCI_NN_GRADCHECK_HPP_
#define EVCI_NN_GRADCHECK_HPP_

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "evci/nn/graph.hpp"

namespace evci::nn {

inline constexpr double kFiniteDifferenceStep = 1e-5;

struct GradCheckResult {
  double max_rel_error = 0.0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t checked = 0;
};

// |a - n| / max(|a|, |n|, 1e-8)
double relative_error(double analytic, double numeric);

// Builds a scalar from leaf variables holding the given inputs.
using InputFn =
    std::function<Var(Graph<double>&, const std::vector<Var>& inputs)>;

// Central-difference check of d f / d inputs over every input coordinate.
// Throws ShapeError if f is not scalar.
GradCheckResult grad_check(const InputFn& f, std::vector<Tensor<double>> inputs,
                           double step = kFiniteDifferenceStep);

// Builds a scalar from a graph whose parameters come from `params`.
using ParamFn = std::function<Var(Graph<double>&)>;

// Same check against selected (parameter index, coordinate) pairs.
GradCheckResult grad_check_parameters(
    ParameterSet<double>& params, const ParamFn& f,
    const std::vector<std::pair<std::size_t, std::size_t>>& coords,
    double step = kFiniteDifferenceStep);

}  // namespace evci::nn

#endif  // EVCI_NN_GRADCHECK_HPP_
