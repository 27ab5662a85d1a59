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

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "fairsv/nn/net.hpp"

namespace fairsv::nn {

/// Adam moments for one parameter tensor. Weight decay is decoupled: the
/// shrink params *= (1 - lr * weight_decay) is applied before the Adam delta
/// rather than folded into the gradient.
struct AdamState {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
  std::int64_t step_count = 0;
  std::vector<double> first_moment;
  std::vector<double> second_moment;
};

inline void adam_step(AdamState& state, std::span<double> params,
                      std::span<const double> grads) {
  require(params.size() == grads.size(), "adam_step: shape mismatch");
  if (state.first_moment.empty()) {
    state.first_moment.assign(params.size(), 0.0);
    state.second_moment.assign(params.size(), 0.0);
  }
  require(state.first_moment.size() == params.size(),
          "adam_step: moment shape mismatch");
  ++state.step_count;
  const double bc1 =
      1.0 - std::pow(state.beta1, static_cast<double>(state.step_count));
  const double bc2 =
      1.0 - std::pow(state.beta2, static_cast<double>(state.step_count));
  const double shrink = 1.0 - state.lr * state.weight_decay;
  for (std::size_t i = 0; i < params.size(); ++i) {
    params[i] *= shrink;
    double& m = state.first_moment[i];
    double& v = state.second_moment[i];
    m = state.beta1 * m + (1.0 - state.beta1) * grads[i];
    v = state.beta2 * v + (1.0 - state.beta2) * grads[i] * grads[i];
    const double mhat = m / bc1;
    const double vhat = v / bc2;
    params[i] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
  }
}

/// Adam over every tensor of a DenseNet (one AdamState per weight matrix and
/// per bias vector).
struct NetOptimizer {
  std::vector<AdamState> states;  // w0, b0, w1, b1, ...

  NetOptimizer() = default;
  NetOptimizer(const DenseNet& net, double lr, double weight_decay) {
    states.resize(2 * net.layers.size());
    for (auto& s : states) {
      s.lr = lr;
      s.weight_decay = weight_decay;
    }
  }

  void step(DenseNet& net, const NetGrads& grads) {
    require(states.size() == 2 * net.layers.size(),
            "NetOptimizer: state count mismatch");
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
      adam_step(states[2 * l], net.layers[l].weights.data,
                grads.weights[l].data);
      adam_step(states[2 * l + 1], net.layers[l].biases, grads.biases[l]);
    }
  }
};

}  // namespace fairsv::nn
