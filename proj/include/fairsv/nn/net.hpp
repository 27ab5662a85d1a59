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

#include <cstdint>
#include <vector>

#include "fairsv/nn/matrix.hpp"
#include "fairsv/rng.hpp"

namespace fairsv::nn {

enum class Activation : std::uint8_t { Relu, Linear };

/// One dense layer. Weights are stored (in x out) so the forward product,
/// the weight gradient and the input gradient all run on contiguous rows.
struct DenseLayer {
  Matrix weights;             // in x out
  std::vector<double> biases; // out
  Activation activation = Activation::Linear;

  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

struct DenseNet {
  std::vector<DenseLayer> layers;

  std::size_t input_dim() const { return layers.front().weights.rows; }
  std::size_t output_dim() const { return layers.back().weights.cols; }

  friend bool operator==(const DenseNet&, const DenseNet&) = default;
};

/// Builds an MLP with ReLU hidden layers and a linear output layer.
/// He-style init: uniform in +-sqrt(6 / fan_in), biases zero.
inline DenseNet make_net(std::size_t input, const std::vector<std::size_t>& hidden,
                         std::size_t output, std::uint64_t seed) {
  DenseNet net;
  Rng rng(seed);
  std::vector<std::size_t> dims;
  dims.push_back(input);
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(output);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    DenseLayer layer;
    layer.weights = Matrix(dims[l], dims[l + 1]);
    layer.biases.assign(dims[l + 1], 0.0);
    layer.activation =
        (l + 2 == dims.size()) ? Activation::Linear : Activation::Relu;
    const double limit = std::sqrt(6.0 / static_cast<double>(dims[l]));
    for (double& w : layer.weights.data) w = (2.0 * rng.uniform() - 1.0) * limit;
    net.layers.push_back(std::move(layer));
  }
  return net;
}

/// Per-layer pre- and post-activation values kept for the backward pass.
struct ForwardTrace {
  std::vector<Matrix> pre;   // one per layer
  std::vector<Matrix> post;  // one per layer; post.back() is the output
  const Matrix& output() const { return post.back(); }
};

inline ForwardTrace forward(const DenseNet& net, const Matrix& input) {
  require(input.cols == net.input_dim(),
          "forward: batch width " + std::to_string(input.cols) +
              " != net input dim " + std::to_string(net.input_dim()));
  ForwardTrace trace;
  const Matrix* x = &input;
  for (const auto& layer : net.layers) {
    Matrix pre;
    matmul(*x, layer.weights, pre);
    for (std::size_t i = 0; i < pre.rows; ++i) {
      double* row = pre.row(i);
      for (std::size_t j = 0; j < pre.cols; ++j) row[j] += layer.biases[j];
    }
    Matrix post = pre;
    if (layer.activation == Activation::Relu) {
      for (double& v : post.data)
        if (v < 0.0) v = 0.0;
    }
    trace.pre.push_back(std::move(pre));
    trace.post.push_back(std::move(post));
    x = &trace.post.back();
  }
  return trace;
}

/// Forward without keeping intermediates.
inline Matrix forward_eval(const DenseNet& net, const Matrix& input) {
  return forward(net, input).post.back();
}

/// Gradients with the same shapes as the net's parameters.
struct NetGrads {
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;
};

inline NetGrads zero_grads(const DenseNet& net) {
  NetGrads g;
  for (const auto& layer : net.layers) {
    g.weights.emplace_back(layer.weights.rows, layer.weights.cols);
    g.biases.emplace_back(layer.biases.size(), 0.0);
  }
  return g;
}

/// Backpropagates dL/d(output) through the net. Returns dL/d(input) and
/// accumulates parameter gradients into `grads` (so several heads can share
/// one call site pattern).
inline Matrix backward(const DenseNet& net, const Matrix& input,
                       const ForwardTrace& trace, const Matrix& grad_output,
                       NetGrads& grads) {
  require(grads.weights.size() == net.layers.size(),
          "backward: gradient holder shape mismatch");
  Matrix d = grad_output;
  for (std::size_t li = net.layers.size(); li-- > 0;) {
    const auto& layer = net.layers[li];
    if (layer.activation == Activation::Relu) {
      const Matrix& pre = trace.pre[li];
      for (std::size_t i = 0; i < d.data.size(); ++i)
        if (pre.data[i] <= 0.0) d.data[i] = 0.0;
    }
    const Matrix& below = (li == 0) ? input : trace.post[li - 1];
    Matrix dw;
    matmul_at_b(below, d, dw);
    add_into(grads.weights[li], dw);
    for (std::size_t i = 0; i < d.rows; ++i) {
      const double* row = d.row(i);
      for (std::size_t j = 0; j < d.cols; ++j) grads.biases[li][j] += row[j];
    }
    if (li == 0) {
      Matrix dx;
      matmul_a_bt(d, layer.weights, dx);
      return dx;
    }
    Matrix dprev;
    matmul_a_bt(d, layer.weights, dprev);
    d = std::move(dprev);
  }
  return Matrix();  // unreachable for non-empty nets
}

// ---------------------------------------------------------------------------
// Dropout
// ---------------------------------------------------------------------------

/// Binary keep mask with surviving entries scaled by 1/(1 - p_drop), so the
/// mask has unit expectation. Deterministic per seed.
inline Matrix dropout_mask(std::size_t rows, std::size_t cols, double p_drop,
                           std::uint64_t seed) {
  require(p_drop >= 0.0 && p_drop < 1.0, "dropout_mask: p_drop must be in [0, 1)");
  Matrix mask(rows, cols);
  Rng rng(seed);
  const double keep_scale = 1.0 / (1.0 - p_drop);
  for (double& v : mask.data)
    v = (rng.uniform() < 1.0 - p_drop) ? keep_scale : 0.0;
  return mask;
}

inline Matrix hadamard(const Matrix& a, const Matrix& b) {
  require(a.rows == b.rows && a.cols == b.cols, "hadamard: shape mismatch");
  Matrix out = a;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] *= b.data[i];
  return out;
}

}  // namespace fairsv::nn
