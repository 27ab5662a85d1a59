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
#include <cstdint>
#include <functional>
#include <numbers>
#include <thread>
#include <vector>

#include "fairsv/metrics.hpp"
#include "fairsv/rng.hpp"

namespace fairsv {

// ---------------------------------------------------------------------------
// Paired permutation tests
//
// Two systems score the identical trial list. Under the null hypothesis the
// per-trial score pair is exchangeable, so each permutation independently
// swaps the two systems' scores per trial with probability 1/2 and
// recomputes the statistic. Two-sided p-value with add-one smoothing:
//   p = (1 + #{|null| >= |observed|}) / (n + 1).
// Permutation masks are derived from (seed, permutation index) alone, so
// parallel and serial runs agree bit-exactly.
// ---------------------------------------------------------------------------

struct PermTestReport {
  double observed_stat = 0.0;
  std::vector<double> null_stats;
  double p_value = 1.0;
  std::size_t n_permutations = 0;
  std::uint64_t seed = 0;
};

namespace detail {

inline void check_aligned(const std::vector<ScoredTrial>& a,
                          const std::vector<ScoredTrial>& b) {
  require(a.size() == b.size(),
          "permutation test: systems scored different trial counts");
  require(!a.empty(), "permutation test: empty trial list");
  for (std::size_t i = 0; i < a.size(); ++i) {
    require(a[i].trial == b[i].trial,
            "permutation test: trial lists disagree at index " +
                std::to_string(i));
  }
}

/// Runs the generic paired-swap permutation machinery. `stat` maps the two
/// aligned score vectors to the test statistic.
inline PermTestReport run_perm_test(
    const std::vector<ScoredTrial>& trials_a,
    const std::vector<ScoredTrial>& trials_b, std::size_t n_permutations,
    std::uint64_t seed, unsigned threads,
    const std::function<double(const std::vector<ScoredTrial>&,
                               const std::vector<ScoredTrial>&)>& stat) {
  require(n_permutations >= 1, "permutation test: n must be >= 1");
  PermTestReport report;
  report.seed = seed;
  report.n_permutations = n_permutations;
  report.observed_stat = stat(trials_a, trials_b);
  report.null_stats.resize(n_permutations);

  auto run_range = [&](std::size_t lo, std::size_t hi) {
    std::vector<ScoredTrial> pa = trials_a;
    std::vector<ScoredTrial> pb = trials_b;
    for (std::size_t p = lo; p < hi; ++p) {
      Rng rng(derive_seed(seed, seed_tag::kPermMask, p));
      for (std::size_t i = 0; i < trials_a.size(); ++i) {
        const bool swap = (rng.next() & 1u) != 0;
        pa[i].score = swap ? trials_b[i].score : trials_a[i].score;
        pb[i].score = swap ? trials_a[i].score : trials_b[i].score;
      }
      report.null_stats[p] = stat(pa, pb);
    }
  };

  if (threads <= 1 || n_permutations < 2 * threads) {
    run_range(0, n_permutations);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n_permutations + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t lo = t * chunk;
      const std::size_t hi = std::min(n_permutations, lo + chunk);
      if (lo < hi) pool.emplace_back(run_range, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  std::size_t extreme = 0;
  const double obs = std::abs(report.observed_stat);
  for (double s : report.null_stats)
    if (std::abs(s) >= obs) ++extreme;
  report.p_value = static_cast<double>(1 + extreme) /
                   static_cast<double>(n_permutations + 1);
  return report;
}

}  // namespace detail

/// Significance of the auFaDR-FAR difference between two systems. The
/// statistic is auFaDR(B) - auFaDR(A) on a seed-deterministic subsample of
/// min(subsample, total) trials.
inline PermTestReport perm_test_aufadr(
    const std::vector<ScoredTrial>& scores_a,
    const std::vector<ScoredTrial>& scores_b, const FadrParams& params,
    const std::vector<double>& far_grid_percent, std::size_t n_permutations,
    std::size_t subsample, std::uint64_t seed, unsigned threads = 1) {
  detail::check_aligned(scores_a, scores_b);
  check_far_grid(far_grid_percent);

  std::vector<ScoredTrial> sub_a = scores_a, sub_b = scores_b;
  if (subsample < scores_a.size()) {
    std::vector<std::uint32_t> idx(scores_a.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
      idx[i] = static_cast<std::uint32_t>(i);
    Rng rng(derive_seed(seed, seed_tag::kPermSubsample));
    for (std::size_t i = 0; i < subsample; ++i) {
      std::size_t j = i + static_cast<std::size_t>(rng.bounded(idx.size() - i));
      std::swap(idx[i], idx[j]);
    }
    idx.resize(subsample);
    std::sort(idx.begin(), idx.end());
    sub_a.clear();
    sub_b.clear();
    for (auto i : idx) {
      sub_a.push_back(scores_a[i]);
      sub_b.push_back(scores_b[i]);
    }
  }

  auto stat = [&](const std::vector<ScoredTrial>& a,
                  const std::vector<ScoredTrial>& b) {
    const double au_a = au_fadr(fadr_curve(partition_scores(a), params,
                                           far_grid_percent));
    const double au_b = au_fadr(fadr_curve(partition_scores(b), params,
                                           far_grid_percent));
    return au_b - au_a;
  };
  return detail::run_perm_test(sub_a, sub_b, n_permutations, seed, threads,
                               stat);
}

/// Significance of the EER difference between two systems; uses all trials.
inline PermTestReport perm_test_eer(const std::vector<ScoredTrial>& scores_a,
                                    const std::vector<ScoredTrial>& scores_b,
                                    std::size_t n_permutations,
                                    std::uint64_t seed, unsigned threads = 1) {
  detail::check_aligned(scores_a, scores_b);
  auto stat = [](const std::vector<ScoredTrial>& a,
                 const std::vector<ScoredTrial>& b) {
    const auto part_a = partition_scores(a);
    const auto part_b = partition_scores(b);
    return eer(part_b.pooled_genuine, part_b.pooled_impostor).eer -
           eer(part_a.pooled_genuine, part_a.pooled_impostor).eer;
  };
  return detail::run_perm_test(scores_a, scores_b, n_permutations, seed,
                               threads, stat);
}

// ---------------------------------------------------------------------------
// Kernel density estimation
// ---------------------------------------------------------------------------

struct KdeEstimate {
  std::vector<double> grid;
  std::vector<double> density;
  double bandwidth = 0.0;
};

namespace detail {

/// Linearly interpolated quantile (the common "type 7" definition) on a
/// sorted array.
inline double quantile_sorted(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

inline double silverman_bandwidth(const std::vector<double>& sorted) {
  const double n = static_cast<double>(sorted.size());
  double mean = 0.0;
  for (double v : sorted) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : sorted) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  require(sd > 0.0, "kde: constant input has no density estimate");
  const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  double spread = std::min(sd, iqr / 1.34);
  if (spread <= 0.0) spread = sd;  // degenerate IQR, fall back to sd
  return 0.9 * spread * std::pow(n, -0.2);
}

}  // namespace detail

/// Gaussian KDE evaluated on a caller-supplied ascending grid.
inline KdeEstimate kde_on_grid(const std::vector<double>& scores,
                               std::vector<double> grid) {
  require(scores.size() >= 2, "kde: need at least 2 scores");
  std::vector<double> sorted = scores;
  std::sort(sorted.begin(), sorted.end());
  const double h = detail::silverman_bandwidth(sorted);

  KdeEstimate est;
  est.bandwidth = h;
  est.grid = std::move(grid);
  est.density.resize(est.grid.size());
  const double norm =
      1.0 / (static_cast<double>(scores.size()) * h *
             std::sqrt(2.0 * std::numbers::pi));
  for (std::size_t i = 0; i < est.grid.size(); ++i) {
    double sum = 0.0;
    for (double s : sorted) {
      const double z = (est.grid[i] - s) / h;
      sum += std::exp(-0.5 * z * z);
    }
    est.density[i] = norm * sum;
  }
  return est;
}

/// Gaussian KDE with rule-of-thumb bandwidth
/// h = 0.9 * min(sd, IQR/1.34) * N^(-1/5) on a uniform grid spanning
/// [min - 3h, max + 3h].
inline KdeEstimate kde(const std::vector<double>& scores,
                       std::size_t grid_size = 512) {
  require(scores.size() >= 2, "kde: need at least 2 scores");
  require(grid_size >= 2, "kde: grid_size must be >= 2");
  std::vector<double> sorted = scores;
  std::sort(sorted.begin(), sorted.end());
  const double h = detail::silverman_bandwidth(sorted);
  const double lo = sorted.front() - 3.0 * h;
  const double hi = sorted.back() + 3.0 * h;
  std::vector<double> grid(grid_size);
  for (std::size_t i = 0; i < grid_size; ++i) {
    grid[i] = lo + (hi - lo) * static_cast<double>(i) /
                       static_cast<double>(grid_size - 1);
  }
  return kde_on_grid(scores, std::move(grid));
}

/// Shared evaluation grid covering both samples' KDE spans.
inline std::vector<double> shared_kde_grid(const std::vector<double>& a,
                                           const std::vector<double>& b,
                                           std::size_t grid_size = 512) {
  const auto ka = kde(a, 2);
  const auto kb = kde(b, 2);
  const double lo = std::min(ka.grid.front(), kb.grid.front());
  const double hi = std::max(ka.grid.back(), kb.grid.back());
  std::vector<double> grid(grid_size);
  for (std::size_t i = 0; i < grid_size; ++i) {
    grid[i] = lo + (hi - lo) * static_cast<double>(i) /
                       static_cast<double>(grid_size - 1);
  }
  return grid;
}

inline double trapezoid(const std::vector<double>& x,
                        const std::vector<double>& y) {
  double area = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i)
    area += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
  return area;
}

/// Percent intersection of two densities evaluated on the same grid:
/// 100 * integral of min(f_a, f_b).
inline double overlap_percent(const KdeEstimate& a, const KdeEstimate& b) {
  require(a.grid.size() == b.grid.size() && a.grid == b.grid,
          "overlap_percent: estimates must share one grid");
  std::vector<double> m(a.grid.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    m[i] = std::min(a.density[i], b.density[i]);
  return 100.0 * trapezoid(a.grid, m);
}

/// Convenience: overlap of two samples' KDEs on a shared grid.
inline double sample_overlap_percent(const std::vector<double>& a,
                                     const std::vector<double>& b,
                                     std::size_t grid_size = 512) {
  auto grid = shared_kde_grid(a, b, grid_size);
  return overlap_percent(kde_on_grid(a, grid), kde_on_grid(b, grid));
}

}  // namespace fairsv
