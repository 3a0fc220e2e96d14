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


#include "evci/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "evci/error.hpp"

namespace evci::nn {
namespace {

double scalar_value(Graph<double>& g, Var root) {
  const Tensor<double>& v = g.value(root);
  if (v.size() != 1) {
    throw ShapeError("gradient check needs a scalar function, got shape " +
                     shape_string(v.shape()));
  }
  return v[0];
}

void record(GradCheckResult& r, double analytic, double numeric) {
  const double e = relative_error(analytic, numeric);
  ++r.checked;
  if (e > r.max_rel_error || r.checked == 1) {
    r.max_rel_error = std::max(r.max_rel_error, e);
    r.worst_analytic = analytic;
    r.worst_numeric = numeric;
  }
}

}  // namespace

double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / denom;
}

GradCheckResult grad_check(const InputFn& f, std::vector<Tensor<double>> inputs,
                           double step) {
  auto evaluate = [&](bool with_grad, std::vector<Tensor<double>>* grads) {
    Graph<double> g;
    std::vector<Var> vars;
    for (const auto& t : inputs) vars.push_back(g.variable(t));
    const Var root = f(g, vars);
    const double value = scalar_value(g, root);
    if (with_grad) {
      g.backward(root);
      for (const Var& v : vars) grads->push_back(g.grad(v));
    }
    return value;
  };

  std::vector<Tensor<double>> analytic;
  evaluate(true, &analytic);

  GradCheckResult result;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    for (std::size_t i = 0; i < inputs[k].size(); ++i) {
      const double orig = inputs[k][i];
      inputs[k][i] = orig + step;
      const double fp = evaluate(false, nullptr);
      inputs[k][i] = orig - step;
      const double fm = evaluate(false, nullptr);
      inputs[k][i] = orig;
      record(result, analytic[k][i], (fp - fm) / (2.0 * step));
    }
  }
  return result;
}

GradCheckResult grad_check_parameters(
    ParameterSet<double>& params, const ParamFn& f,
    const std::vector<std::pair<std::size_t, std::size_t>>& coords,
    double step) {
  auto& items = params.items();
  params.zero_grad();
  {
    Graph<double> g;
    const Var root = f(g);
    scalar_value(g, root);
    g.backward(root);
  }
  auto evaluate = [&]() {
    Graph<double> g;
    return scalar_value(g, f(g));
  };

  GradCheckResult result;
  for (const auto& [pi, ci] : coords) {
    if (pi >= items.size() || ci >= items[pi].value.size()) {
      throw ArgumentError("gradient check coordinate out of range");
    }
    double& x = items[pi].value[ci];
    const double orig = x;
    x = orig + step;
    const double fp = evaluate();
    x = orig - step;
    const double fm = evaluate();
    x = orig;
    record(result, items[pi].grad[ci], (fp - fm) / (2.0 * step));
  }
  return result;
}

}  // namespace evci::nn
