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

#include "fairsv/metrics.hpp"
#include "oracle.hpp"
#include "test_helpers.hpp"

using namespace fairsv;

namespace {

ScorePartition partition_of(const oracle::ScoreSet& s) {
  ScorePartition p;
  p.genuine_g1 = s.genuine_g1;
  p.genuine_g2 = s.genuine_g2;
  p.impostor_g1 = s.impostor_g1;
  p.impostor_g2 = s.impostor_g2;
  p.pooled_genuine = s.pooled_genuine();
  p.pooled_impostor = s.pooled_impostor();
  for (auto* v : {&p.genuine_g1, &p.genuine_g2, &p.impostor_g1, &p.impostor_g2,
                  &p.pooled_genuine, &p.pooled_impostor})
    std::sort(v->begin(), v->end());
  return p;
}

oracle::ScoreSet random_set(Rng& rng, std::size_t max_per_cell) {
  auto draw = [&](std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = 2.0 * rng.uniform() - 1.0;
    return v;
  };
  oracle::ScoreSet s;
  s.genuine_g1 = draw(1 + rng.bounded(max_per_cell));
  s.genuine_g2 = draw(1 + rng.bounded(max_per_cell));
  s.impostor_g1 = draw(1 + rng.bounded(max_per_cell));
  s.impostor_g2 = draw(1 + rng.bounded(max_per_cell));
  return s;
}

}  // namespace

TEST_CASE("far_at / frr_at hand counts") {
  const std::vector<double> scores{0.1, 0.5, 0.9};
  REQUIRE(far_at(scores, 0.5) == Catch::Approx(2.0 / 3.0));
  REQUIRE(frr_at(scores, 0.5) == Catch::Approx(1.0 / 3.0));
  REQUIRE(far_at(scores, 0.0) == 1.0);
  REQUIRE(far_at(scores, 1.0) == 0.0);
  REQUIRE(frr_at(scores, 0.0) == 0.0);
  REQUIRE(frr_at(scores, 1.0) == 1.0);
  REQUIRE_THROWS_AS(far_at({}, 0.5), Error);
  REQUIRE_THROWS_AS(frr_at({}, 0.5), Error);
}

TEST_CASE("far/frr monotone over all candidate thresholds") {
  Rng rng(2024);
  std::vector<double> scores(50);
  for (auto& s : scores) s = rng.uniform();
  std::sort(scores.begin(), scores.end());
  auto candidates = oracle::distinct_sorted(scores);
  candidates.push_back(std::numeric_limits<double>::infinity());
  candidates.insert(candidates.begin(),
                    -std::numeric_limits<double>::infinity());
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    REQUIRE(far_at(scores, candidates[i]) <= far_at(scores, candidates[i - 1]));
    REQUIRE(frr_at(scores, candidates[i]) >= frr_at(scores, candidates[i - 1]));
  }
}

TEST_CASE("threshold_for_pooled_far on the 10-score ladder") {
  oracle::ScoreSet s;
  s.genuine_g1 = {1.0};
  s.genuine_g2 = {1.0};
  s.impostor_g1 = {0.0, 0.1, 0.2, 0.3, 0.4};
  s.impostor_g2 = {0.5, 0.6, 0.7, 0.8, 0.9};
  const auto p = partition_of(s);

  const auto op = threshold_for_pooled_far(p, 0.10);
  REQUIRE(op.tau == 0.9);
  REQUIRE(op.pooled_far == Catch::Approx(0.10));

  const auto all = threshold_for_pooled_far(p, 1.0);
  REQUIRE(all.tau == 0.0);  // min score accepts everything
  REQUIRE(all.pooled_far == 1.0);

  const auto none = threshold_for_pooled_far(p, 0.05);  // < 1/N
  REQUIRE(std::isinf(none.tau));
  REQUIRE(none.pooled_far == 0.0);

  REQUIRE_THROWS_AS(threshold_for_pooled_far(ScorePartition{}, 0.1), Error);
}

TEST_CASE("fadr hand evaluations") {
  SECTION("equal rates give perfect fairness at any omega") {
    const GroupErrorRates r{0.2, 0.2, 0.07, 0.07};
    for (double omega : {0.0, 0.25, 0.5, 0.75, 1.0})
      REQUIRE(fadr(r, {omega}) == 1.0);
  }
  SECTION("weighted combination") {
    const GroupErrorRates r{0.10, 0.04, 0.02, 0.05};
    REQUIRE(fadr(r, {0.5}) == Catch::Approx(0.955).epsilon(1e-12));
    REQUIRE(fadr(r, {1.0}) == Catch::Approx(0.94).epsilon(1e-12));
    REQUIRE(fadr(r, {0.0}) == Catch::Approx(0.97).epsilon(1e-12));
  }
}

TEST_CASE("fadr algebra on random rates") {
  Rng rng(555);
  for (int iter = 0; iter < 10000; ++iter) {
    const GroupErrorRates r{rng.uniform(), rng.uniform(), rng.uniform(),
                            rng.uniform()};
    const GroupErrorRates swapped{r.far_g2, r.far_g1, r.frr_g2, r.frr_g1};
    const double omega = rng.uniform();
    const double f = fadr(r, {omega});
    REQUIRE(f >= 0.0);
    REQUIRE(f <= 1.0);
    // Swapping group labels changes nothing.
    REQUIRE(fadr(swapped, {omega}) == f);
    // Affine in omega: f(w) = w f(1) + (1-w) f(0).
    const double f0 = fadr(r, {0.0});
    const double f1 = fadr(r, {1.0});
    REQUIRE(std::abs(f - (omega * f1 + (1.0 - omega) * f0)) < 1e-12);
    // Endpoint formulas, percent-scaled.
    REQUIRE(std::abs(100.0 * f0 -
                     (100.0 - std::abs(100.0 * r.frr_g1 - 100.0 * r.frr_g2))) <
            1e-10);
    REQUIRE(std::abs(100.0 * f1 -
                     (100.0 - std::abs(100.0 * r.far_g1 - 100.0 * r.far_g2))) <
            1e-10);
  }
}

TEST_CASE("fadr_curve trivial shapes") {
  SECTION("identical group multisets give a constant 100 curve") {
    oracle::ScoreSet s;
    Rng rng(31);
    for (int i = 0; i < 40; ++i) {
      const double g = rng.uniform(), im = -rng.uniform();
      s.genuine_g1.push_back(g);
      s.genuine_g2.push_back(g);
      s.impostor_g1.push_back(im);
      s.impostor_g2.push_back(im);
    }
    const auto curve =
        fadr_curve(partition_of(s), {0.5}, default_far_grid_percent());
    REQUIRE(curve.points.size() == 37);
    for (const auto& pt : curve.points)
      REQUIRE(pt.fadr_percent == Catch::Approx(100.0).margin(1e-9));
    REQUIRE(au_fadr(curve) == Catch::Approx(900.0).margin(1e-6));
  }
  SECTION("single-point grid equals a direct fadr evaluation") {
    Rng rng(32);
    const auto s = random_set(rng, 50);
    const auto p = partition_of(s);
    const auto curve = fadr_curve(p, {0.75}, {10.0});
    const auto op = threshold_for_pooled_far(p, 0.10);
    REQUIRE(curve.points.size() == 1);
    REQUIRE(curve.points[0].fadr_percent ==
            100.0 * fadr(group_rates_at(p, op.tau), {0.75}));
  }
}

TEST_CASE("au_fadr hand values") {
  FadrCurve constant50;
  FadrCurve ramp;
  for (double x : {1.0, 4.0, 7.0, 10.0})
    constant50.points.push_back({x, 50.0});
  ramp.points.push_back({1.0, 100.0});
  ramp.points.push_back({10.0, 0.0});
  REQUIRE(au_fadr(constant50) == Catch::Approx(450.0));
  REQUIRE(au_fadr(ramp) == Catch::Approx(450.0));
  FadrCurve single;
  single.points.push_back({1.0, 10.0});
  REQUIRE_THROWS_AS(au_fadr(single), Error);
}

TEST_CASE("eer examples") {
  SECTION("hand-swept example") {
    const auto r = eer({0.9, 0.8, 0.7, 0.2}, {0.6, 0.3, 0.1, 0.05});
    REQUIRE(r.eer == Catch::Approx(0.25));
    REQUIRE(r.tau == 0.6);
  }
  SECTION("perfect separation") {
    const auto r = eer({0.8, 0.9}, {0.1, 0.2});
    REQUIRE(r.eer == 0.0);
  }
  SECTION("identical multisets sit at 0.5") {
    const std::vector<double> v{0.1, 0.4, 0.42, 0.9};
    REQUIRE(eer(v, v).eer == Catch::Approx(0.5));
  }
  SECTION("empty inputs") {
    REQUIRE_THROWS_AS(eer({}, {0.1}), Error);
    REQUIRE_THROWS_AS(eer({0.1}, {}), Error);
  }
}

TEST_CASE("eer gap bound") {
  Rng rng(808);
  for (int iter = 0; iter < 100; ++iter) {
    std::vector<double> genuine(1 + rng.bounded(40));
    std::vector<double> impostor(1 + rng.bounded(40));
    for (auto& v : genuine) v = rng.uniform() + 0.2;
    for (auto& v : impostor) v = rng.uniform() - 0.2;
    const auto r = eer(genuine, impostor);
    std::sort(genuine.begin(), genuine.end());
    std::sort(impostor.begin(), impostor.end());
    const double gap =
        std::abs(far_at(impostor, r.tau) - frr_at(genuine, r.tau));
    REQUIRE(gap <= std::max(1.0 / genuine.size(), 1.0 / impostor.size()) +
                       1e-12);
  }
}

TEST_CASE("group_error_curves") {
  SECTION("identical groups coincide") {
    oracle::ScoreSet s;
    Rng rng(77);
    for (int i = 0; i < 30; ++i) {
      s.genuine_g1.push_back(rng.uniform());
      s.impostor_g1.push_back(-rng.uniform());
    }
    s.genuine_g2 = s.genuine_g1;
    s.impostor_g2 = s.impostor_g1;
    const auto curves =
        group_error_curves(partition_of(s), default_far_grid_percent());
    for (const auto& pt : curves.points) {
      REQUIRE(pt.far_g1 == pt.far_g2);
      REQUIRE(pt.frr_g1 == pt.frr_g2);
    }
  }
  SECTION("stochastically dominant impostor scores keep far_g1 on top") {
    oracle::ScoreSet s;
    Rng rng(78);
    for (int i = 0; i < 60; ++i) {
      s.genuine_g1.push_back(0.7 + 0.3 * rng.uniform());
      s.genuine_g2.push_back(0.7 + 0.3 * rng.uniform());
      s.impostor_g1.push_back(0.2 + 0.3 * rng.uniform());  // uniformly above
      s.impostor_g2.push_back(-0.5 + 0.3 * rng.uniform());
    }
    const auto curves =
        group_error_curves(partition_of(s), default_far_grid_percent());
    for (const auto& pt : curves.points) REQUIRE(pt.far_g1 >= pt.far_g2);
  }
  SECTION("points recompose from far_at/frr_at") {
    Rng rng(79);
    const auto s = random_set(rng, 80);
    const auto p = partition_of(s);
    const auto curves = group_error_curves(p, {2.0, 5.0, 10.0});
    for (const auto& pt : curves.points) {
      const auto op = threshold_for_pooled_far(p, pt.pooled_far_percent / 100.0);
      REQUIRE(pt.far_g1 == 100.0 * far_at(p.impostor_g1, op.tau));
      REQUIRE(pt.frr_g2 == 100.0 * frr_at(p.genuine_g2, op.tau));
    }
  }
}

TEST_CASE("metrics match the exhaustive brute-force oracle") {
  Rng rng(90210);
  const auto grid = default_far_grid_percent();
  for (int iter = 0; iter < 50; ++iter) {
    const auto s = random_set(rng, 120);
    const auto p = partition_of(s);
    const double omega = rng.uniform();

    const auto curve = fadr_curve(p, {omega}, grid);
    const auto expect = oracle::fadr_curve(s, omega, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      REQUIRE(curve.points[i].pooled_far_percent == expect[i].far_percent);
      REQUIRE(std::abs(curve.points[i].fadr_percent - expect[i].fadr_percent) <=
              1e-12);
    }
    REQUIRE(std::abs(au_fadr(curve) - oracle::trapezoid_area(expect)) <= 1e-12);

    const auto e = eer(s.pooled_genuine(), s.pooled_impostor());
    const auto oe = oracle::eer(s.pooled_genuine(), s.pooled_impostor());
    REQUIRE(e.eer == oe.eer);
    REQUIRE(e.tau == oe.tau);
  }
}

TEST_CASE("au_fadr never exceeds the 900 bound") {
  Rng rng(4242);
  const auto grid = default_far_grid_percent();
  for (int iter = 0; iter < 200; ++iter) {
    const auto s = random_set(rng, 60);
    const auto curve = fadr_curve(partition_of(s), {rng.uniform()}, grid);
    REQUIRE(au_fadr(curve) <= 900.0 + 1e-9);
    REQUIRE(au_fadr(curve) >= 0.0);
  }
}

TEST_CASE("grid validation") {
  Rng rng(5);
  const auto s = random_set(rng, 20);
  const auto p = partition_of(s);
  REQUIRE_THROWS_AS(fadr_curve(p, {0.5}, {5.0, 5.0}), Error);
  REQUIRE_THROWS_AS(fadr_curve(p, {0.5}, {0.0, 5.0}), Error);
  REQUIRE_THROWS_AS(fadr_curve(p, {0.5}, {}), Error);
  REQUIRE_THROWS_AS(fadr_curve(p, {0.5}, {5.0, 101.0}), Error);
}
