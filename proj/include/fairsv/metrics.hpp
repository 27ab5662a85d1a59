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
#include <limits>
#include <vector>

#include "fairsv/scoring.hpp"

// Threshold-sweep error analysis. Convention throughout: a trial is accepted
// iff score >= tau. Candidate thresholds are the distinct observed score
// values plus +/-infinity sentinels; together they attain every reachable
// (FAR, FRR) pair on finite data.

namespace fairsv {

/// False acceptance rate |{s >= tau}| / N on an ascending-sorted array.
inline double far_at(const std::vector<double>& impostor_scores, double tau) {
  require(!impostor_scores.empty(), "far_at: empty score array");
  auto it = std::lower_bound(impostor_scores.begin(), impostor_scores.end(), tau);
  return static_cast<double>(impostor_scores.end() - it) /
         static_cast<double>(impostor_scores.size());
}

/// False rejection rate |{s < tau}| / N on an ascending-sorted array.
inline double frr_at(const std::vector<double>& genuine_scores, double tau) {
  require(!genuine_scores.empty(), "frr_at: empty score array");
  auto it = std::lower_bound(genuine_scores.begin(), genuine_scores.end(), tau);
  return static_cast<double>(it - genuine_scores.begin()) /
         static_cast<double>(genuine_scores.size());
}

/// A threshold together with the demographic-agnostic FAR it achieves.
struct OperatingPoint {
  double tau = 0.0;
  double pooled_far = 0.0;
};

/// Smallest tau from {pooled impostor values} U {+inf} whose pooled FAR does
/// not exceed target_far.
inline OperatingPoint threshold_for_pooled_far(const ScorePartition& partition,
                                               double target_far) {
  const auto& pooled = partition.pooled_impostor;
  require(!pooled.empty(), "threshold_for_pooled_far: no impostor scores");
  require(target_far > 0.0 && target_far <= 1.0,
          "threshold_for_pooled_far: target FAR must be in (0, 1]");
  const double n = static_cast<double>(pooled.size());
  // pooled is ascending; tau = pooled[i] accepts everything from the first
  // occurrence of pooled[i] onward.
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    if (i > 0 && pooled[i] == pooled[i - 1]) continue;
    const double far = static_cast<double>(
                           pooled.end() - std::lower_bound(pooled.begin(),
                                                           pooled.end(),
                                                           pooled[i])) /
                       n;
    if (far <= target_far) return {pooled[i], far};
  }
  return {std::numeric_limits<double>::infinity(), 0.0};
}

/// Per-group error rates at a shared threshold.
struct GroupErrorRates {
  double far_g1 = 0.0, far_g2 = 0.0;
  double frr_g1 = 0.0, frr_g2 = 0.0;
};

inline GroupErrorRates group_rates_at(const ScorePartition& p, double tau) {
  return GroupErrorRates{far_at(p.impostor_g1, tau), far_at(p.impostor_g2, tau),
                         frr_at(p.genuine_g1, tau), frr_at(p.genuine_g2, tau)};
}

/// Error discrepancy weight: 1.0 weighs only the FAR gap, 0.0 only the FRR
/// gap between the groups.
struct FadrParams {
  double omega = 0.5;
};

/// Fairness discrepancy rate in [0, 1]:
///   1 - (omega * |FAR_g1 - FAR_g2| + (1 - omega) * |FRR_g1 - FRR_g2|).
inline double fadr(const GroupErrorRates& rates, const FadrParams& params) {
  require(params.omega >= 0.0 && params.omega <= 1.0,
          "fadr: omega must be in [0, 1]");
  const double far_gap = std::abs(rates.far_g1 - rates.far_g2);
  const double frr_gap = std::abs(rates.frr_g1 - rates.frr_g2);
  return 1.0 - (params.omega * far_gap + (1.0 - params.omega) * frr_gap);
}

/// FaDR (in percent) against demographic-agnostic FAR (in percent).
struct FadrCurve {
  struct Point {
    double pooled_far_percent = 0.0;
    double fadr_percent = 0.0;
  };
  std::vector<Point> points;
};

/// Default operating grid: 1% to 10% demographic-agnostic FAR, step 0.25%.
inline std::vector<double> default_far_grid_percent() {
  std::vector<double> grid;
  for (int i = 0; i <= 36; ++i) grid.push_back(1.0 + 0.25 * i);
  return grid;
}

inline void check_far_grid(const std::vector<double>& grid) {
  require(!grid.empty(), "FAR grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    require(grid[i] > 0.0 && grid[i] <= 100.0,
            "FAR grid values must be in (0, 100]");
    require(i == 0 || grid[i] > grid[i - 1],
            "FAR grid must be strictly increasing");
  }
}

/// Evaluates FaDR at each grid operating point. The x coordinate is the
/// requested grid FAR; the threshold is chosen so the achieved pooled FAR
/// does not exceed it.
inline FadrCurve fadr_curve(const ScorePartition& partition,
                            const FadrParams& params,
                            const std::vector<double>& far_grid_percent) {
  check_far_grid(far_grid_percent);
  FadrCurve curve;
  curve.points.reserve(far_grid_percent.size());
  for (double g : far_grid_percent) {
    const auto op = threshold_for_pooled_far(partition, g / 100.0);
    const double f = fadr(group_rates_at(partition, op.tau), params);
    curve.points.push_back({g, 100.0 * f});
  }
  return curve;
}

/// Trapezoidal area under a FaDR curve; over the default [1, 10] grid the
/// possible range is [0, 900], with 900 meaning perfect fairness everywhere.
inline double au_fadr(const FadrCurve& curve) {
  require(curve.points.size() >= 2, "au_fadr: need at least 2 curve points");
  double area = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& a = curve.points[i - 1];
    const auto& b = curve.points[i];
    area += 0.5 * (a.fadr_percent + b.fadr_percent) *
            (b.pooled_far_percent - a.pooled_far_percent);
  }
  return area;
}

struct EerResult {
  double eer = 0.0;
  double tau = 0.0;
};

/// Equal error rate: sweeps candidate thresholds (distinct score values plus
/// +/-inf), picks the one minimizing |FAR - FRR| and reports the midpoint
/// (FAR + FRR) / 2 there. Ties break toward the smaller midpoint, then the
/// smaller threshold. Exact FAR = FRR is unattainable on finite data, hence
/// the midpoint convention.
inline EerResult eer(const std::vector<double>& genuine_scores,
                     const std::vector<double>& impostor_scores) {
  require(!genuine_scores.empty() && !impostor_scores.empty(),
          "eer: empty score array");
  std::vector<double> genuine = genuine_scores;
  std::vector<double> impostor = impostor_scores;
  std::sort(genuine.begin(), genuine.end());
  std::sort(impostor.begin(), impostor.end());

  std::vector<double> candidates;
  candidates.reserve(genuine.size() + impostor.size() + 2);
  candidates.push_back(-std::numeric_limits<double>::infinity());
  candidates.insert(candidates.end(), genuine.begin(), genuine.end());
  candidates.insert(candidates.end(), impostor.begin(), impostor.end());
  candidates.push_back(std::numeric_limits<double>::infinity());
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());

  EerResult best{std::numeric_limits<double>::infinity(), 0.0};
  double best_gap = std::numeric_limits<double>::infinity();
  for (double tau : candidates) {
    const double far = far_at(impostor, tau);
    const double frr = frr_at(genuine, tau);
    const double gap = std::abs(far - frr);
    const double mid = 0.5 * (far + frr);
    if (gap < best_gap || (gap == best_gap && mid < best.eer)) {
      best_gap = gap;
      best = {mid, tau};
    }
  }
  return best;
}

/// Raw per-group rates (in percent) along the pooled-FAR grid; unlike FaDR
/// the sign of the gap is preserved, showing which group is impacted.
struct GroupErrorCurves {
  struct Point {
    double pooled_far_percent = 0.0;
    double far_g1 = 0.0, far_g2 = 0.0;
    double frr_g1 = 0.0, frr_g2 = 0.0;
  };
  std::vector<Point> points;
};

inline GroupErrorCurves group_error_curves(
    const ScorePartition& partition,
    const std::vector<double>& far_grid_percent) {
  check_far_grid(far_grid_percent);
  GroupErrorCurves curves;
  curves.points.reserve(far_grid_percent.size());
  for (double g : far_grid_percent) {
    const auto op = threshold_for_pooled_far(partition, g / 100.0);
    const auto r = group_rates_at(partition, op.tau);
    curves.points.push_back({g, 100.0 * r.far_g1, 100.0 * r.far_g2,
                             100.0 * r.frr_g1, 100.0 * r.frr_g2});
  }
  return curves;
}

}  // namespace fairsv
