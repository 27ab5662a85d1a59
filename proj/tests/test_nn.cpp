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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fairsv/nn/adam.hpp"
#include "fairsv/nn/checkpoint.hpp"
#include "fairsv/nn/grad_check.hpp"
#include "fairsv/nn/loss.hpp"
#include "fairsv/nn/net.hpp"
#include "fairsv/rng.hpp"

using namespace fairsv;
using namespace fairsv::nn;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng, double scale = 1.0) {
  Matrix m(r, c);
  for (auto& v : m.data) v = scale * rng.normal();
  return m;
}

/// Random net whose pre-activations stay clear of ReLU kinks for the batch.
std::pair<DenseNet, Matrix> kink_free_case(std::size_t in,
                                           const std::vector<std::size_t>& hidden,
                                           std::size_t out, std::uint64_t seed) {
  Rng rng(seed);
  for (int attempt = 0; attempt < 100; ++attempt) {
    DenseNet net = make_net(in, hidden, out, rng.next());
    Matrix batch = random_matrix(4, in, rng);
    const auto trace = forward(net, batch);
    if (away_from_kinks(net, trace)) return {std::move(net), std::move(batch)};
  }
  FAIL("could not sample a kink-free configuration");
  return {};
}

}  // namespace

TEST_CASE("forward basics") {
  SECTION("identity linear layer passes input through") {
    DenseNet net;
    DenseLayer layer;
    layer.weights = Matrix(3, 3);
    for (int i = 0; i < 3; ++i) layer.weights(i, i) = 1.0;
    layer.biases.assign(3, 0.0);
    layer.activation = Activation::Linear;
    net.layers.push_back(layer);

    Rng rng(1);
    const Matrix x = random_matrix(5, 3, rng);
    REQUIRE(forward_eval(net, x) == x);
  }
  SECTION("relu clamps negative pre-activations to zero") {
    DenseNet net;
    DenseLayer layer;
    layer.weights = Matrix(2, 2);
    layer.weights(0, 0) = 1.0;
    layer.weights(1, 1) = 1.0;
    layer.biases.assign(2, 0.0);
    layer.activation = Activation::Relu;
    net.layers.push_back(layer);

    Matrix x(1, 2);
    x(0, 0) = -3.0;
    x(0, 1) = -0.5;
    const auto y = forward_eval(net, x);
    REQUIRE(y(0, 0) == 0.0);
    REQUIRE(y(0, 1) == 0.0);
  }
  SECTION("two-layer hand-computed case") {
    // x = (1, 2); W1 = [[1, -1], [0, 2]], b1 = (0.5, -0.5), ReLU
    // h = relu((1*1 + 2*0 + 0.5, 1*-1 + 2*2 - 0.5)) = (1.5, 2.5)
    // W2 = [[2, 0], [1, 1]], b2 = (0, 1) -> y = (5.5, 3.5)
    DenseNet net;
    DenseLayer l1, l2;
    l1.weights = Matrix(2, 2);
    l1.weights(0, 0) = 1;
    l1.weights(0, 1) = -1;
    l1.weights(1, 0) = 0;
    l1.weights(1, 1) = 2;
    l1.biases = {0.5, -0.5};
    l1.activation = Activation::Relu;
    l2.weights = Matrix(2, 2);
    l2.weights(0, 0) = 2;
    l2.weights(0, 1) = 0;
    l2.weights(1, 0) = 1;
    l2.weights(1, 1) = 1;
    l2.biases = {0, 1};
    l2.activation = Activation::Linear;
    net.layers = {l1, l2};

    Matrix x(1, 2);
    x(0, 0) = 1;
    x(0, 1) = 2;
    const auto y = forward_eval(net, x);
    REQUIRE(y(0, 0) == Catch::Approx(5.5));
    REQUIRE(y(0, 1) == Catch::Approx(3.5));
  }
  SECTION("dimension mismatch") {
    const auto net = make_net(4, {3}, 2, 1);
    REQUIRE_THROWS_AS(forward(net, Matrix(2, 5)), Error);
  }
}

TEST_CASE("softmax_xent values") {
  SECTION("uniform logits give ln K") {
    for (std::size_t k : {2u, 5u, 10u}) {
      Matrix logits(3, k);  // all zeros
      const auto lv = softmax_xent(logits, std::vector<int>{0, 1, 0});
      REQUIRE(lv.loss ==
              Catch::Approx(std::log(static_cast<double>(k))).epsilon(1e-12));
    }
  }
  SECTION("large correct-class margin drives the loss to zero") {
    Matrix logits(1, 3);
    logits(0, 1) = 50.0;
    REQUIRE(softmax_xent(logits, {1}).loss < 1e-12);
  }
  SECTION("two-class hand value ln(1 + e^-1)") {
    Matrix logits(1, 2);
    logits(0, 0) = 1.0;
    logits(0, 1) = 0.0;
    REQUIRE(softmax_xent(logits, {0}).loss ==
            Catch::Approx(0.31326168751822286).epsilon(1e-14));
  }
  SECTION("out-of-range label") {
    Matrix logits(1, 2);
    REQUIRE_THROWS_AS(softmax_xent(logits, {2}), Error);
  }
}

TEST_CASE("mse values") {
  Matrix pred(1, 2), target(1, 2);
  REQUIRE(mse(pred, target).loss == 0.0);

  pred(0, 0) = 1.0;
  pred(0, 1) = 1.0;
  target(0, 0) = 0.0;
  target(0, 1) = 0.0;
  REQUIRE(mse(pred, target).loss == Catch::Approx(1.0));

  pred(0, 0) = 1.0;
  pred(0, 1) = 2.0;
  REQUIRE(mse(pred, target).loss == Catch::Approx(2.5));

  REQUIRE_THROWS_AS(mse(Matrix(1, 2), Matrix(2, 1)), Error);
}

TEST_CASE("dropout_mask") {
  SECTION("p = 0 keeps everything at unit scale") {
    const auto mask = dropout_mask(10, 10, 0.0, 5);
    for (double v : mask.data) REQUIRE(v == 1.0);
  }
  SECTION("kept fraction concentrates around 1 - p") {
    const auto mask = dropout_mask(1000, 100, 0.75, 9);
    std::size_t kept = 0;
    for (double v : mask.data) {
      REQUIRE((v == 0.0 || v == 4.0));  // scale 1/(1 - 0.75)
      if (v != 0.0) ++kept;
    }
    const double frac = static_cast<double>(kept) / 1e5;
    REQUIRE(std::abs(frac - 0.25) < 0.01);
  }
  SECTION("deterministic per seed") {
    REQUIRE(dropout_mask(8, 8, 0.5, 77) == dropout_mask(8, 8, 0.5, 77));
    REQUIRE(dropout_mask(8, 8, 0.5, 77) != dropout_mask(8, 8, 0.5, 78));
  }
  SECTION("p >= 1 rejected") {
    REQUIRE_THROWS_AS(dropout_mask(2, 2, 1.0, 0), Error);
  }
}

TEST_CASE("adam_step") {
  SECTION("zero gradients leave parameters unchanged") {
    AdamState state;
    state.lr = 1e-3;
    std::vector<double> params{1.0, -2.0, 3.0};
    const auto before = params;
    std::vector<double> grads{0.0, 0.0, 0.0};
    adam_step(state, params, grads);
    REQUIRE(params == before);
  }
  SECTION("first step with unit gradient moves by ~ -lr") {
    AdamState state;
    state.lr = 1e-3;
    std::vector<double> params{0.0};
    std::vector<double> grads{1.0};
    adam_step(state, params, grads);
    REQUIRE(params[0] == Catch::Approx(-1e-3 / (1.0 + 1e-8)).epsilon(1e-12));
  }
  SECTION("decoupled weight decay shrinks before the update") {
    AdamState state;
    state.lr = 0.1;
    state.weight_decay = 0.5;
    std::vector<double> params{2.0};
    std::vector<double> grads{0.0};
    adam_step(state, params, grads);
    REQUIRE(params[0] == Catch::Approx(2.0 * (1.0 - 0.1 * 0.5)));
  }
  SECTION("shape mismatch") {
    AdamState state;
    std::vector<double> params{1.0, 2.0};
    std::vector<double> grads{1.0};
    REQUIRE_THROWS_AS(adam_step(state, params, grads), Error);
  }
}

TEST_CASE("grad check: MSE through a 3-layer ReLU stack") {
  for (std::uint64_t seed : {11u, 22u, 33u}) {
    auto [net, batch] = kink_free_case(5, {8, 6}, 4, seed);
    Rng rng(seed + 1000);
    const Matrix target = random_matrix(4, 4, rng);

    const auto trace = forward(net, batch);
    const auto lv = mse(trace.output(), target);
    NetGrads grads = zero_grads(net);
    backward(net, batch, trace, lv.grad, grads);

    const double err = grad_check_net(net, grads, [&] {
      return mse(forward_eval(net, batch), target).loss;
    });
    REQUIRE(err < 1e-5);
  }
}

TEST_CASE("grad check: cross-entropy head") {
  for (std::uint64_t seed : {7u, 8u}) {
    auto [net, batch] = kink_free_case(6, {10}, 3, seed);
    const std::vector<int> labels{0, 2, 1, 2};

    const auto trace = forward(net, batch);
    const auto lv = softmax_xent(trace.output(), labels);
    NetGrads grads = zero_grads(net);
    backward(net, batch, trace, lv.grad, grads);

    const double err = grad_check_net(net, grads, [&] {
      return softmax_xent(forward_eval(net, batch), labels).loss;
    });
    REQUIRE(err < 1e-5);
  }
}

TEST_CASE("grad check: dropout path with a frozen mask") {
  auto [net, batch] = kink_free_case(5, {7}, 5, 77);
  const Matrix mask = dropout_mask(4, 5, 0.4, 123);
  Rng rng(5);
  const Matrix target = random_matrix(4, 5, rng);

  // loss = mse(mask .* net(x), target)
  const auto trace = forward(net, batch);
  const Matrix masked = hadamard(trace.output(), mask);
  const auto lv = mse(masked, target);
  NetGrads grads = zero_grads(net);
  backward(net, batch, trace, hadamard(lv.grad, mask), grads);

  const double err = grad_check_net(net, grads, [&] {
    return mse(hadamard(forward_eval(net, batch), mask), target).loss;
  });
  REQUIRE(err < 1e-5);
}

TEST_CASE("linear regression gradient matches the closed form") {
  // Single linear layer, MSE: dW = 2 X^T (XW + b - Y) / (n * out_dim).
  Rng rng(99);
  DenseNet net = make_net(4, {}, 3, 12);
  const Matrix x = random_matrix(6, 4, rng);
  const Matrix y = random_matrix(6, 3, rng);

  const auto trace = forward(net, x);
  const auto lv = mse(trace.output(), y);
  NetGrads grads = zero_grads(net);
  backward(net, x, trace, lv.grad, grads);

  Matrix residual = trace.output();
  for (std::size_t i = 0; i < residual.data.size(); ++i)
    residual.data[i] = 2.0 * (residual.data[i] - y.data[i]) /
                       static_cast<double>(residual.size());
  Matrix expect;
  matmul_at_b(x, residual, expect);
  for (std::size_t i = 0; i < expect.data.size(); ++i)
    REQUIRE(std::abs(grads.weights[0].data[i] - expect.data[i]) < 1e-8);
}

TEST_CASE("fixed-seed training is bitwise reproducible") {
  auto run = [] {
    DenseNet net = make_net(3, {5}, 2, 42);
    NetOptimizer opt(net, 1e-3, 1e-4);
    Rng rng(7);
    for (int step = 0; step < 20; ++step) {
      Matrix x = random_matrix(8, 3, rng);
      std::vector<int> labels(8);
      for (auto& l : labels) l = static_cast<int>(rng.bounded(2));
      const auto trace = forward(net, x);
      const auto lv = softmax_xent(trace.output(), labels);
      NetGrads grads = zero_grads(net);
      backward(net, x, trace, lv.grad, grads);
      opt.step(net, grads);
    }
    return net;
  };
  REQUIRE(run() == run());  // bitwise equality of all parameters
}

TEST_CASE("checkpoint round-trip") {
  DenseNet net = make_net(4, {6, 5}, 3, 31);
  const auto j = net_to_json(net);
  const DenseNet loaded = net_from_json(j);
  REQUIRE(loaded == net);

  auto bad = j;
  bad["layers"][0]["weights"] = std::vector<double>{1.0};
  REQUIRE_THROWS_AS(net_from_json(bad), Error);
}
