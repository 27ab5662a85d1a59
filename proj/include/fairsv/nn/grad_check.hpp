// Copyright 2026 The fairsv authors
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

#include <functional>
#include <span>

#include "fairsv/nn/net.hpp"

namespace fairsv::nn {

/// A parameter tensor paired with its analytic gradient.
struct ParamCheck {
  std::span<double> params;
  std::span<const double> grads;
};

/// Compares analytic gradients against central finite differences. Returns
/// the max scaled error |analytic - numeric| / max(|analytic|, |numeric|, 1e-3);
/// the floor keeps near-zero gradients from inflating the ratio past what
/// double-precision differencing can resolve. Only valid away from ReLU
/// kinks: resample the batch if any pre-activation sits within ~1e-4 of 0.
inline double grad_check(std::span<ParamCheck> tensors,
                         const std::function<double()>& loss_fn,
                         double epsilon = 1e-5) {
  double max_err = 0.0;
  for (auto& t : tensors) {
    require(t.params.size() == t.grads.size(), "grad_check: shape mismatch");
    for (std::size_t i = 0; i < t.params.size(); ++i) {
      const double saved = t.params[i];
      t.params[i] = saved + epsilon;
      const double plus = loss_fn();
      t.params[i] = saved - epsilon;
      const double minus = loss_fn();
      t.params[i] = saved;
      const double numeric = (plus - minus) / (2.0 * epsilon);
      const double analytic = t.grads[i];
      const double denom =
          std::max({std::abs(analytic), std::abs(numeric), 1e-3});
      max_err = std::max(max_err, std::abs(analytic - numeric) / denom);
    }
  }
  return max_err;
}

/// Grad check for one net against a loss closure that re-evaluates the loss
/// from the net's current parameters.
inline double grad_check_net(DenseNet& net, const NetGrads& analytic,
                             const std::function<double()>& loss_fn,
                             double epsilon = 1e-5) {
  std::vector<ParamCheck> tensors;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    tensors.push_back({net.layers[l].weights.data, analytic.weights[l].data});
    tensors.push_back({net.layers[l].biases, analytic.biases[l]});
  }
  return grad_check(tensors, loss_fn, epsilon);
}

/// True if every ReLU pre-activation is at least `margin` away from zero,
/// i.e. the configuration is safe for finite differencing.
inline bool away_from_kinks(const DenseNet& net, const ForwardTrace& trace,
                            double margin = 1e-4) {
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    if (net.layers[l].activation != Activation::Relu) continue;
    for (double v : trace.pre[l].data)
      if (std::abs(v) < margin) return false;
  }
  return true;
}

}  // namespace fairsv::nn
