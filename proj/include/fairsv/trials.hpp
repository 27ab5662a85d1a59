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

#include <algorithm>
#include <cstdint>
#include <unordered_set>
#include <vector>

#include "fairsv/rng.hpp"
#include "fairsv/types.hpp"

namespace fairsv {

namespace detail {

// Candidate pair of record positions, enrol < test in record order.
using UttPair = std::pair<std::uint32_t, std::uint32_t>;

inline std::vector<UttPair> sample_pairs(std::vector<UttPair> all,
                                         std::size_t max_count, Rng& rng) {
  if (all.size() <= max_count) return all;
  // Partial Fisher-Yates: the first max_count slots end up a uniform sample.
  for (std::size_t i = 0; i < max_count; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng.bounded(all.size() - i));
    std::swap(all[i], all[j]);
  }
  all.resize(max_count);
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace detail

/// Emits same-group verification trials only: per (group, label) cell at most
/// max_per_category trials, deterministically for a fixed seed. Impostor
/// pairs are unordered (cosine scoring is symmetric) and no utterance is
/// ever paired with itself.
inline std::vector<Trial> generate_trials(const DatasetSplit& split,
                                          std::size_t max_per_category,
                                          std::uint64_t seed) {
  require(max_per_category >= 1, "max_per_category must be >= 1");
  std::vector<Trial> trials;
  std::uint64_t cell = 0;
  for (Group g : {Group::G1, Group::G2}) {
    auto git = split.group_index.find(g);
    require(git != split.group_index.end() && git->second.size() >= 2,
            std::string("group ") + to_string(g) +
                ": need at least 2 speakers to form impostor trials");

    // Record positions per speaker, in record order.
    std::vector<std::vector<std::uint32_t>> by_speaker;
    for (const auto& spk : git->second) {
      std::vector<std::uint32_t> utts;
      for (const auto& utt : split.speaker_index.at(spk))
        utts.push_back(static_cast<std::uint32_t>(split.utt_lookup.at(utt)));
      by_speaker.push_back(std::move(utts));
    }

    std::vector<detail::UttPair> genuine;
    for (const auto& utts : by_speaker)
      for (std::size_t a = 0; a < utts.size(); ++a)
        for (std::size_t b = a + 1; b < utts.size(); ++b)
          genuine.emplace_back(utts[a], utts[b]);
    require(!genuine.empty(),
            std::string("group ") + to_string(g) +
                ": no speaker has 2 utterances, cannot form genuine trials");

    std::vector<detail::UttPair> impostor;
    for (std::size_t s = 0; s < by_speaker.size(); ++s)
      for (std::size_t t = s + 1; t < by_speaker.size(); ++t)
        for (auto a : by_speaker[s])
          for (auto b : by_speaker[t])
            impostor.emplace_back(std::min(a, b), std::max(a, b));
    require(!impostor.empty(), std::string("group ") + to_string(g) +
                                   ": no impostor pairs available");

    const GroupTag tag = g == Group::G1 ? GroupTag::G1 : GroupTag::G2;
    for (auto [label, pool] :
         {std::pair{TrialLabel::Genuine, &genuine},
          std::pair{TrialLabel::Impostor, &impostor}}) {
      Rng rng(derive_seed(seed, seed_tag::kTrials, cell++));
      for (auto [a, b] : detail::sample_pairs(std::move(*pool),
                                              max_per_category, rng)) {
        trials.push_back(Trial{split.records[a].utt_id,
                               split.records[b].utt_id, label, tag});
      }
    }
  }
  return trials;
}

}  // namespace fairsv
