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
#include <cmath>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

#include "fairsv/types.hpp"

namespace fairsv {

/// Cosine similarity: inner product of the two unit-normalized vectors.
/// Norms are computed per call; desk-scale inputs make caching pointless.
inline double cosine_score(std::span<const double> a,
                           std::span<const double> b) {
  require(a.size() == b.size(), "cosine_score: length mismatch (" +
                                    std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()) + ")");
  require(!a.empty(), "cosine_score: empty vectors");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  require(na > 0.0 && nb > 0.0, "cosine_score: zero-norm input");
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

/// Scores each trial with cosine similarity; output order matches input.
/// With threads > 1 the trial list is scored in disjoint chunks; the output
/// ordering (and so every downstream artifact) is identical to a serial run.
inline std::vector<ScoredTrial> score_trials(const DatasetSplit& split,
                                             const std::vector<Trial>& trials,
                                             unsigned threads = 1) {
  std::vector<ScoredTrial> scored(trials.size());
  auto run_range = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const auto& t = trials[i];
      const auto& e = split.by_utt(t.enrol_utt);
      const auto& s = split.by_utt(t.test_utt);
      scored[i] = ScoredTrial{t, cosine_score(e.vector, s.vector)};
    }
  };
  if (threads <= 1 || trials.size() < 2 * threads) {
    run_range(0, trials.size());
  } else {
    std::vector<std::thread> pool;
    std::mutex err_mutex;
    std::exception_ptr err;
    const std::size_t chunk = (trials.size() + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t lo = t * chunk;
      const std::size_t hi = std::min(trials.size(), lo + chunk);
      if (lo >= hi) continue;
      pool.emplace_back([&, lo, hi] {
        try {
          run_range(lo, hi);
        } catch (...) {
          std::scoped_lock lock(err_mutex);
          if (!err) err = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
  }
  return scored;
}

/// Scores split by (group, label), each array ascending-sorted, plus the
/// demographic-agnostic pools.
struct ScorePartition {
  std::vector<double> genuine_g1, genuine_g2;
  std::vector<double> impostor_g1, impostor_g2;
  std::vector<double> pooled_genuine, pooled_impostor;

  const std::vector<double>& genuine(Group g) const {
    return g == Group::G1 ? genuine_g1 : genuine_g2;
  }
  const std::vector<double>& impostor(Group g) const {
    return g == Group::G1 ? impostor_g1 : impostor_g2;
  }
};

/// Splits scores into the four (group, label) cells and the pooled arrays.
/// Cross-group trials are rejected: per-group error rates are undefined for
/// them and the evaluation protocol excludes them.
inline ScorePartition partition_scores(const std::vector<ScoredTrial>& scored) {
  ScorePartition p;
  for (const auto& st : scored) {
    require(st.trial.group_tag != GroupTag::Cross,
            "partition_scores: cross-group trial (" + st.trial.enrol_utt +
                ", " + st.trial.test_utt + ") not allowed");
    const bool g1 = st.trial.group_tag == GroupTag::G1;
    if (st.trial.label == TrialLabel::Genuine) {
      (g1 ? p.genuine_g1 : p.genuine_g2).push_back(st.score);
      p.pooled_genuine.push_back(st.score);
    } else {
      (g1 ? p.impostor_g1 : p.impostor_g2).push_back(st.score);
      p.pooled_impostor.push_back(st.score);
    }
  }
  for (auto* v : {&p.genuine_g1, &p.genuine_g2, &p.impostor_g1, &p.impostor_g2,
                  &p.pooled_genuine, &p.pooled_impostor})
    std::stable_sort(v->begin(), v->end());
  return p;
}

}  // namespace fairsv
