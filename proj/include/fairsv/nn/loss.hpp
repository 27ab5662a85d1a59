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
#include <vector>

#include "fairsv/nn/matrix.hpp"

namespace fairsv::nn {

struct LossValue {
  double loss = 0.0;
  Matrix grad;  // with respect to the first argument (logits / predictions)
};

/// Mean categorical cross-entropy with softmax, stabilized by max-shift.
/// grad = (softmax - onehot) / batch.
inline LossValue softmax_xent(const Matrix& logits,
                              const std::vector<int>& labels) {
  require(logits.rows == labels.size(), "softmax_xent: batch size mismatch");
  require(logits.rows > 0, "softmax_xent: empty batch");
  LossValue out;
  out.grad = Matrix(logits.rows, logits.cols);
  const double inv_batch = 1.0 / static_cast<double>(logits.rows);
  for (std::size_t i = 0; i < logits.rows; ++i) {
    const int label = labels[i];
    require(label >= 0 && static_cast<std::size_t>(label) < logits.cols,
            "softmax_xent: label " + std::to_string(label) +
                " out of range for " + std::to_string(logits.cols) + " classes");
    const double* row = logits.row(i);
    double mx = row[0];
    for (std::size_t j = 1; j < logits.cols; ++j) mx = std::max(mx, row[j]);
    double denom = 0.0;
    for (std::size_t j = 0; j < logits.cols; ++j) denom += std::exp(row[j] - mx);
    out.loss += -(row[label] - mx - std::log(denom)) * inv_batch;
    double* grow = out.grad.row(i);
    for (std::size_t j = 0; j < logits.cols; ++j)
      grow[j] = std::exp(row[j] - mx) / denom * inv_batch;
    grow[label] -= inv_batch;
  }
  return out;
}

/// Number of rows whose argmax matches the label.
inline std::size_t argmax_correct(const Matrix& logits,
                                  const std::vector<int>& labels) {
  std::size_t correct = 0;
  for (std::size_t i = 0; i < logits.rows; ++i) {
    const double* row = logits.row(i);
    std::size_t best = 0;
    for (std::size_t j = 1; j < logits.cols; ++j)
      if (row[j] > row[best]) best = j;
    if (static_cast<int>(best) == labels[i]) ++correct;
  }
  return correct;
}

/// Mean squared error over all entries. grad = 2 (pred - target) / count.
inline LossValue mse(const Matrix& pred, const Matrix& target) {
  require(pred.rows == target.rows && pred.cols == target.cols,
          "mse: shape mismatch");
  require(pred.size() > 0, "mse: empty input");
  LossValue out;
  out.grad = Matrix(pred.rows, pred.cols);
  const double inv_count = 1.0 / static_cast<double>(pred.size());
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    const double diff = pred.data[i] - target.data[i];
    out.loss += diff * diff * inv_count;
    out.grad.data[i] = 2.0 * diff * inv_count;
  }
  return out;
}

/// Per-batch loss values of the embedding-transformation objective. The
/// composite terms satisfy primary = alpha * pred + beta * recon and
/// secondary = dis1 + dis2 by construction; modules inactive in the current
/// mode contribute exact zeros.
struct LossReport {
  double pred = 0.0;   // speaker cross-entropy
  double recon = 0.0;  // decoder reconstruction MSE
  double dis1 = 0.0;   // speaker code predicted from nuisance code (MSE)
  double dis2 = 0.0;   // nuisance code predicted from speaker code (MSE)
  double bias = 0.0;   // group cross-entropy
  double primary = 0.0;
  double secondary = 0.0;
};

}  // namespace fairsv::nn
