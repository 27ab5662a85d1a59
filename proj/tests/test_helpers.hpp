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

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "fairsv/rng.hpp"
#include "fairsv/scoring.hpp"
#include "fairsv/types.hpp"

namespace testutil {

/// Scoped temporary directory under the system temp path.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("fairsv_test_" + tag + "_" + std::to_string(counter_++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  const std::filesystem::path& path() const { return path_; }

 private:
  static inline int counter_ = 0;
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

/// Small random dataset: n_speakers per group, utts each, dimension dim.
inline fairsv::DatasetSplit random_split(std::size_t n_speakers_per_group,
                                         std::size_t utts, std::size_t dim,
                                         std::uint64_t seed) {
  fairsv::Rng rng(seed);
  std::vector<fairsv::EmbeddingRecord> records;
  int spk = 0;
  for (auto group : {fairsv::Group::G1, fairsv::Group::G2}) {
    for (std::size_t s = 0; s < n_speakers_per_group; ++s, ++spk) {
      std::vector<double> mean(dim);
      for (auto& v : mean) v = rng.normal();
      for (std::size_t u = 0; u < utts; ++u) {
        fairsv::EmbeddingRecord r;
        r.speaker_id = "spk" + std::to_string(spk);
        r.utt_id = r.speaker_id + "_u" + std::to_string(u);
        r.group = group;
        r.vector.resize(dim);
        for (std::size_t d = 0; d < dim; ++d)
          r.vector[d] = mean[d] + 0.3 * rng.normal();
        records.push_back(std::move(r));
      }
    }
  }
  return fairsv::make_split(std::move(records));
}

/// Random scored trial list with the given per-cell sizes; scores uniform
/// in [-1, 1]. Trials carry synthetic ids (not resolvable in any split).
inline std::vector<fairsv::ScoredTrial> random_scored(
    std::size_t genuine_g1, std::size_t impostor_g1, std::size_t genuine_g2,
    std::size_t impostor_g2, std::uint64_t seed) {
  fairsv::Rng rng(seed);
  std::vector<fairsv::ScoredTrial> scored;
  int n = 0;
  auto add = [&](std::size_t count, fairsv::TrialLabel label,
                 fairsv::GroupTag tag) {
    for (std::size_t i = 0; i < count; ++i, ++n) {
      fairsv::Trial t;
      t.enrol_utt = "e" + std::to_string(n);
      t.test_utt = "t" + std::to_string(n);
      t.label = label;
      t.group_tag = tag;
      scored.push_back({t, 2.0 * rng.uniform() - 1.0});
    }
  };
  add(genuine_g1, fairsv::TrialLabel::Genuine, fairsv::GroupTag::G1);
  add(impostor_g1, fairsv::TrialLabel::Impostor, fairsv::GroupTag::G1);
  add(genuine_g2, fairsv::TrialLabel::Genuine, fairsv::GroupTag::G2);
  add(impostor_g2, fairsv::TrialLabel::Impostor, fairsv::GroupTag::G2);
  return scored;
}

}  // namespace testutil
