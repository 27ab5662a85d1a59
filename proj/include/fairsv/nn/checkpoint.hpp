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

#include <string>

#include <json.hpp>

#include "fairsv/nn/net.hpp"

// Self-describing JSON checkpoints: layer shapes plus row-major parameter
// arrays. nlohmann/json emits doubles with enough digits for an exact
// round-trip.

namespace fairsv::nn {

inline nlohmann::json net_to_json(const DenseNet& net) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& layer : net.layers) {
    layers.push_back({
        {"in", layer.weights.rows},
        {"out", layer.weights.cols},
        {"activation",
         layer.activation == Activation::Relu ? "relu" : "linear"},
        {"weights", layer.weights.data},
        {"biases", layer.biases},
    });
  }
  return {{"layers", layers}};
}

inline DenseNet net_from_json(const nlohmann::json& j) {
  DenseNet net;
  for (const auto& lj : j.at("layers")) {
    DenseLayer layer;
    const std::size_t in = lj.at("in").get<std::size_t>();
    const std::size_t out = lj.at("out").get<std::size_t>();
    layer.weights = Matrix(in, out);
    layer.weights.data = lj.at("weights").get<std::vector<double>>();
    require(layer.weights.data.size() == in * out,
            "checkpoint: weight array size mismatch");
    layer.biases = lj.at("biases").get<std::vector<double>>();
    require(layer.biases.size() == out, "checkpoint: bias array size mismatch");
    const std::string act = lj.at("activation").get<std::string>();
    require(act == "relu" || act == "linear",
            "checkpoint: unknown activation '" + act + "'");
    layer.activation = act == "relu" ? Activation::Relu : Activation::Linear;
    net.layers.push_back(std::move(layer));
  }
  require(!net.layers.empty(), "checkpoint: net has no layers");
  return net;
}

}  // namespace fairsv::nn
