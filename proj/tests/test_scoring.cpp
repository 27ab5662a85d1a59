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

#include <map>

#include "fairsv/scoring.hpp"
#include "fairsv/trials.hpp"
#include "test_helpers.hpp"

using namespace fairsv;

TEST_CASE("cosine_score basics") {
  const std::vector<double> a{3, 4};
  REQUIRE(cosine_score(a, a) == Catch::Approx(1.0).margin(1e-15));
  REQUIRE(cosine_score(std::vector<double>{1, 0},
                       std::vector<double>{0, 1}) == 0.0);
  // <(1,0), (1,1)> / (1 * sqrt(2))
  REQUIRE(cosine_score(std::vector<double>{1, 0},
                       std::vector<double>{1, 1}) ==
          Catch::Approx(0.70710678118654752).epsilon(1e-14));
}

TEST_CASE("cosine_score error paths") {
  REQUIRE_THROWS_AS(cosine_score(std::vector<double>{1, 2},
                                 std::vector<double>{1}),
                    Error);
  REQUIRE_THROWS_AS(cosine_score(std::vector<double>{0, 0},
                                 std::vector<double>{1, 1}),
                    Error);
}

TEST_CASE("cosine_score symmetry and positive-scale invariance") {
  Rng rng(123);
  for (int iter = 0; iter < 200; ++iter) {
    const std::size_t dim = 1 + rng.bounded(16);
    std::vector<double> a(dim), b(dim);
    for (auto& v : a) v = rng.normal();
    for (auto& v : b) v = rng.normal();
    const double c = 0.01 + 10.0 * rng.uniform();
    std::vector<double> ca = a;
    for (auto& v : ca) v *= c;
    REQUIRE(std::abs(cosine_score(a, b) - cosine_score(b, a)) < 1e-12);
    REQUIRE(std::abs(cosine_score(ca, b) - cosine_score(a, b)) < 1e-12);
    REQUIRE(cosine_score(a, b) >= -1.0 - 1e-12);
    REQUIRE(cosine_score(a, b) <= 1.0 + 1e-12);
  }
}

TEST_CASE("score_trials matches per-pair recomputation") {
  const auto split = testutil::random_split(3, 3, 5, 77);
  const auto trials = generate_trials(split, 20, 3);
  const auto scored = score_trials(split, trials);
  REQUIRE(scored.size() == trials.size());
  for (std::size_t i = 0; i < trials.size(); ++i) {
    REQUIRE(scored[i].trial == trials[i]);  // order preserved
    const double expect = cosine_score(split.by_utt(trials[i].enrol_utt).vector,
                                       split.by_utt(trials[i].test_utt).vector);
    REQUIRE(scored[i].score == expect);
  }
}

TEST_CASE("score_trials parallel chunks match the serial run") {
  const auto split = testutil::random_split(6, 4, 8, 99);
  const auto trials = generate_trials(split, 200, 4);
  const auto serial = score_trials(split, trials);
  const auto parallel = score_trials(split, trials, 4);
  REQUIRE(parallel.size() == serial.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    REQUIRE(parallel[i].trial == serial[i].trial);
    REQUIRE(parallel[i].score == serial[i].score);
  }
}

TEST_CASE("score_trials edge cases") {
  const auto split = testutil::random_split(2, 2, 3, 5);
  REQUIRE(score_trials(split, {}).empty());

  Trial t{split.records[0].utt_id, split.records[0].utt_id,
          TrialLabel::Genuine, GroupTag::G1};
  const auto scored = score_trials(split, {t});
  REQUIRE(scored[0].score == Catch::Approx(1.0).margin(1e-12));

  Trial bad{"missing", split.records[0].utt_id, TrialLabel::Genuine,
            GroupTag::G1};
  REQUIRE_THROWS_WITH(score_trials(split, {bad}),
                      Catch::Matchers::ContainsSubstring("missing"));
}

TEST_CASE("partition_scores counts and sorts") {
  auto scored = testutil::random_scored(2, 0, 0, 1, 9);
  const auto p = partition_scores(scored);
  REQUIRE(p.genuine_g1.size() == 2);
  REQUIRE(p.genuine_g2.empty());
  REQUIRE(p.impostor_g1.empty());
  REQUIRE(p.impostor_g2.size() == 1);
  REQUIRE(p.pooled_genuine.size() == 2);
  REQUIRE(p.pooled_impostor.size() == 1);
  REQUIRE(std::is_sorted(p.genuine_g1.begin(), p.genuine_g1.end()));
}

TEST_CASE("partition_scores is a multiset bijection") {
  auto scored = testutil::random_scored(17, 23, 11, 5, 31);
  // Inject duplicates to exercise multiset semantics.
  scored[3].score = scored[4].score;
  const auto p = partition_scores(scored);

  std::multiset<double> in, out;
  for (const auto& st : scored) in.insert(st.score);
  for (const auto* v : {&p.genuine_g1, &p.genuine_g2, &p.impostor_g1,
                        &p.impostor_g2})
    out.insert(v->begin(), v->end());
  REQUIRE(in == out);

  std::multiset<double> pooled(p.pooled_genuine.begin(),
                               p.pooled_genuine.end());
  pooled.insert(p.pooled_impostor.begin(), p.pooled_impostor.end());
  REQUIRE(pooled == in);
  REQUIRE(p.pooled_genuine.size() == p.genuine_g1.size() + p.genuine_g2.size());
  REQUIRE(p.pooled_impostor.size() ==
          p.impostor_g1.size() + p.impostor_g2.size());
}

TEST_CASE("partition_scores rejects cross-group trials") {
  std::vector<ScoredTrial> scored{
      {Trial{"a", "b", TrialLabel::Impostor, GroupTag::Cross}, 0.5}};
  REQUIRE_THROWS_AS(partition_scores(scored), Error);
}
