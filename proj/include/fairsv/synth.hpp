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
#include <string>
#include <vector>

#include "fairsv/rng.hpp"
#include "fairsv/types.hpp"

// Seeded generator of demographically skewed synthetic embeddings.
//
// Speaker means follow a Gaussian mixture:
//   mu_s = sqrt(rho_g) * c_g + sqrt(1 - rho_g) * z_s,   z_s ~ N(0, I)
// where c_g = group_direction_strength * sqrt(D) * u_g and u_g is a fixed
// per-group unit direction. Utterances are x = mu_s + eps with
// eps ~ N(0, noise_sigma^2 I). At strength 1 the construction is normalized:
// E||mu_s||^2 = D for any rho, so within-group impostor cosine sits near
// rho_g while genuine-score distributions stay group-symmetric. Raising
// rho_g therefore skews only that group's impostor scores, and the c_g
// component makes group membership linearly detectable from x.

namespace fairsv::synth {

struct SynthConfig {
  std::size_t dim = 64;
  std::size_t speakers_g1 = 200;
  std::size_t speakers_g2 = 200;
  std::size_t utts_per_speaker = 20;
  double rho_g1 = 0.0;  // within-group speaker-mean correlation
  double rho_g2 = 0.0;
  double noise_sigma = 0.3;
  double group_direction_strength = 1.0;
  std::uint64_t seed = 0;

  void validate() const {
    require(dim >= 1, "synth: dim must be >= 1");
    require(speakers_g1 >= 1 && speakers_g2 >= 1 && utts_per_speaker >= 1,
            "synth: all counts must be >= 1");
    require(rho_g1 >= 0.0 && rho_g1 < 1.0 && rho_g2 >= 0.0 && rho_g2 < 1.0,
            "synth: rho must be in [0, 1)");
    require(noise_sigma > 0.0, "synth: noise_sigma must be positive");
    require(group_direction_strength >= 0.0,
            "synth: group_direction_strength must be >= 0");
  }
};

namespace detail {

/// Two orthonormal directions derived from the seed.
inline std::pair<std::vector<double>, std::vector<double>> group_directions(
    std::size_t dim, std::uint64_t seed) {
  Rng rng(derive_seed(seed, seed_tag::kSynthDirection));
  std::vector<double> u1(dim), u2(dim);
  for (auto& v : u1) v = rng.normal();
  for (auto& v : u2) v = rng.normal();
  auto norm = [](std::vector<double>& v) {
    double n = 0.0;
    for (double x : v) n += x * x;
    n = std::sqrt(n);
    for (double& x : v) x /= n;
  };
  norm(u1);
  double dot = 0.0;
  for (std::size_t i = 0; i < dim; ++i) dot += u1[i] * u2[i];
  for (std::size_t i = 0; i < dim; ++i) u2[i] -= dot * u1[i];
  if (dim == 1) u2 = u1;  // no orthogonal direction exists in 1-D
  norm(u2);
  return {std::move(u1), std::move(u2)};
}

}  // namespace detail

/// Generates the synthetic dataset, deterministically for a fixed config.
inline DatasetSplit generate(const SynthConfig& cfg) {
  cfg.validate();
  const auto [u1, u2] = detail::group_directions(cfg.dim, cfg.seed);
  const double scale =
      cfg.group_direction_strength * std::sqrt(static_cast<double>(cfg.dim));

  std::vector<EmbeddingRecord> records;
  records.reserve((cfg.speakers_g1 + cfg.speakers_g2) * cfg.utts_per_speaker);
  std::size_t speaker_counter = 0;
  for (Group g : {Group::G1, Group::G2}) {
    const std::size_t n_speakers =
        g == Group::G1 ? cfg.speakers_g1 : cfg.speakers_g2;
    const double rho = g == Group::G1 ? cfg.rho_g1 : cfg.rho_g2;
    const auto& direction = g == Group::G1 ? u1 : u2;
    for (std::size_t s = 0; s < n_speakers; ++s) {
      Rng rng(derive_seed(cfg.seed, seed_tag::kSynthSpeaker, speaker_counter));
      std::vector<double> mean(cfg.dim);
      for (std::size_t d = 0; d < cfg.dim; ++d) {
        mean[d] = std::sqrt(rho) * scale * direction[d] +
                  std::sqrt(1.0 - rho) * rng.normal();
      }
      char spk_name[32];
      std::snprintf(spk_name, sizeof(spk_name), "%s_spk%04zu", to_string(g),
                    speaker_counter);
      for (std::size_t u = 0; u < cfg.utts_per_speaker; ++u) {
        EmbeddingRecord rec;
        rec.speaker_id = spk_name;
        char utt_name[48];
        std::snprintf(utt_name, sizeof(utt_name), "%s_utt%03zu", spk_name, u);
        rec.utt_id = utt_name;
        rec.group = g;
        rec.vector.resize(cfg.dim);
        for (std::size_t d = 0; d < cfg.dim; ++d)
          rec.vector[d] = mean[d] + cfg.noise_sigma * rng.normal();
        records.push_back(std::move(rec));
      }
      ++speaker_counter;
    }
  }
  return make_split(std::move(records));
}

struct Scenario {
  std::string name;
  SynthConfig config;
};

/// Named presets mirroring the data regimes of interest: gender-balanced
/// data without and with an impostor-score skew, and a skewed, imbalanced
/// set whose ~2.57:1 speaker ratio echoes the unbalanced corpus.
/// The preset sizes keep full pipeline runs in the minutes range on a
/// single core.
inline std::vector<Scenario> make_scenarios() {
  std::vector<Scenario> scenarios;
  {
    SynthConfig c;
    c.speakers_g1 = c.speakers_g2 = 40;
    c.utts_per_speaker = 10;
    c.rho_g1 = c.rho_g2 = 0.25;
    c.noise_sigma = 0.3;
    scenarios.push_back({"balanced-unbiased", c});
  }
  {
    SynthConfig c;
    c.speakers_g1 = c.speakers_g2 = 40;
    c.utts_per_speaker = 10;
    c.rho_g1 = 0.5;
    c.rho_g2 = 0.0;
    c.noise_sigma = 0.3;
    scenarios.push_back({"balanced-biased", c});
  }
  {
    SynthConfig c;
    c.speakers_g1 = 70;   // minority group
    c.speakers_g2 = 180;  // 180/70 ~ 2.57
    c.utts_per_speaker = 10;
    c.rho_g1 = 0.5;
    c.rho_g2 = 0.0;
    c.noise_sigma = 0.3;
    scenarios.push_back({"imbalanced-biased", c});
  }
  return scenarios;
}

inline SynthConfig scenario_config(const std::string& name) {
  for (const auto& s : make_scenarios())
    if (s.name == name) return s.config;
  fail("unknown preset '" + name +
       "' (expected balanced-unbiased | balanced-biased | imbalanced-biased)");
}

}  // namespace fairsv::synth
