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

#include <cstddef>
#include <span>
#include <vector>

#include "fairsv/common.hpp"

namespace fairsv::nn {

/// Dense row-major matrix of doubles. Kept deliberately small: the training
/// stack needs exactly the three product shapes below and nothing more.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) {
    return data[i * cols + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return data[i * cols + j];
  }
  double* row(std::size_t i) { return data.data() + i * cols; }
  const double* row(std::size_t i) const { return data.data() + i * cols; }
  std::size_t size() const { return data.size(); }

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

/// out = a * b, (m x k) * (k x n). The k-innermost ordering keeps both the
/// b-row and out-row accesses contiguous so the loop vectorizes.
inline void matmul(const Matrix& a, const Matrix& b, Matrix& out) {
  require(a.cols == b.rows, "matmul: inner dimensions differ");
  out.rows = a.rows;
  out.cols = b.cols;
  out.data.assign(a.rows * b.cols, 0.0);
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double* arow = a.row(i);
    double* orow = out.row(i);
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double av = arow[k];
      const double* brow = b.row(k);
      for (std::size_t j = 0; j < b.cols; ++j) orow[j] += av * brow[j];
    }
  }
}

/// out = a^T * b, (m x p)^T * (m x n) -> (p x n). Used for weight gradients.
inline void matmul_at_b(const Matrix& a, const Matrix& b, Matrix& out) {
  require(a.rows == b.rows, "matmul_at_b: row counts differ");
  out.rows = a.cols;
  out.cols = b.cols;
  out.data.assign(a.cols * b.cols, 0.0);
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double* arow = a.row(i);
    const double* brow = b.row(i);
    for (std::size_t p = 0; p < a.cols; ++p) {
      const double av = arow[p];
      double* orow = out.row(p);
      for (std::size_t j = 0; j < b.cols; ++j) orow[j] += av * brow[j];
    }
  }
}

/// out = a * b^T, (m x n) * (p x n)^T -> (m x p). Used to push gradients to
/// the previous layer. Four rows of b at a time so the reductions pipeline.
inline void matmul_a_bt(const Matrix& a, const Matrix& b, Matrix& out) {
  require(a.cols == b.cols, "matmul_a_bt: column counts differ");
  out.rows = a.rows;
  out.cols = b.rows;
  out.data.assign(a.rows * b.rows, 0.0);
  const std::size_t n = a.cols;
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double* arow = a.row(i);
    double* orow = out.row(i);
    std::size_t p = 0;
    for (; p + 4 <= b.rows; p += 4) {
      const double* b0 = b.row(p);
      const double* b1 = b.row(p + 1);
      const double* b2 = b.row(p + 2);
      const double* b3 = b.row(p + 3);
      double d0 = 0.0, d1 = 0.0, d2 = 0.0, d3 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double av = arow[j];
        d0 += av * b0[j];
        d1 += av * b1[j];
        d2 += av * b2[j];
        d3 += av * b3[j];
      }
      orow[p] = d0;
      orow[p + 1] = d1;
      orow[p + 2] = d2;
      orow[p + 3] = d3;
    }
    for (; p < b.rows; ++p) {
      const double* brow = b.row(p);
      double dot = 0.0;
      for (std::size_t j = 0; j < n; ++j) dot += arow[j] * brow[j];
      orow[p] = dot;
    }
  }
}

/// Column-block views used by the encoder split and the decoder input.
inline Matrix columns(const Matrix& m, std::size_t first, std::size_t count) {
  require(first + count <= m.cols, "columns: block out of range");
  Matrix out(m.rows, count);
  for (std::size_t i = 0; i < m.rows; ++i) {
    const double* src = m.row(i) + first;
    double* dst = out.row(i);
    for (std::size_t j = 0; j < count; ++j) dst[j] = src[j];
  }
  return out;
}

inline Matrix hconcat(const Matrix& a, const Matrix& b) {
  require(a.rows == b.rows, "hconcat: row counts differ");
  Matrix out(a.rows, a.cols + b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    double* dst = out.row(i);
    const double* arow = a.row(i);
    const double* brow = b.row(i);
    for (std::size_t j = 0; j < a.cols; ++j) dst[j] = arow[j];
    for (std::size_t j = 0; j < b.cols; ++j) dst[a.cols + j] = brow[j];
  }
  return out;
}

inline void add_into(Matrix& acc, const Matrix& delta) {
  require(acc.rows == delta.rows && acc.cols == delta.cols,
          "add_into: shape mismatch");
  for (std::size_t i = 0; i < acc.data.size(); ++i)
    acc.data[i] += delta.data[i];
}

}  // namespace fairsv::nn
