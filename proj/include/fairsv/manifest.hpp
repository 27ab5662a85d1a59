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
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairsv/common.hpp"
#include "fairsv/version.hpp"

namespace fairsv {

/// Provenance record written alongside every command's output directory.
/// Re-running the recorded command in serial mode reproduces the outputs
/// byte-identically; the manifest itself carries the (non-deterministic)
/// wall-clock duration and is not part of that guarantee.
struct RunManifest {
  std::string command;
  nlohmann::json config;
  std::uint64_t seed = 0;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::string tool_version = kVersion;
  double duration_seconds = 0.0;
};

inline void write_manifest(const RunManifest& m,
                           const std::filesystem::path& dir) {
  nlohmann::json j{{"command", m.command},
                   {"config", m.config},
                   {"seed", m.seed},
                   {"inputs", m.inputs},
                   {"outputs", m.outputs},
                   {"tool_version", m.tool_version},
                   {"duration_seconds", m.duration_seconds}};
  std::ofstream out(dir / "manifest.json");
  if (!out) fail("cannot write manifest in '" + dir.string() + "'");
  out << j.dump(2) << "\n";
}

}  // namespace fairsv
