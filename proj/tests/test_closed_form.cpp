// Copyright 2026 The tow Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <variant>

#include "oracles.hpp"
#include "tow/closed_form.hpp"
#include "tow/dpp.hpp"
#include "tow/game_sim.hpp"

namespace {

using tow::SegmentCase;

void expect_values(const tow::ValueFunction& got, const std::vector<double>& want, double tol) {
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(got[i], want[i], tol) << "node " << i;
}

TEST(QParameter, Examples) {
  EXPECT_EQ(tow::q_parameter(tow::build_segment(2, 0, 30, 1)), 30.0);
  EXPECT_EQ(tow::q_parameter(tow::build_segment(2, 5, 5, 2)), 0.0);
  EXPECT_EQ(tow::q_parameter(tow::build_segment(2, 0, 2, 1)), 2.0);
  EXPECT_EQ(tow::q_parameter(tow::build_segment(2, 2, 0, 1)), 2.0);
  EXPECT_THROW(tow::q_parameter(tow::build_star({1, 1, 1}, {0, 0, 0}, 1)), tow::InvalidArgument);
}

TEST(SegmentValue, CaseA) {
  const auto sol = tow::segment_value(tow::build_segment(2, 0, 30, 1));
  EXPECT_EQ(sol.case_label, SegmentCase::a);
  expect_values(sol.values, {0, 10, 20, 30}, 1e-12);
}

TEST(SegmentValue, CaseB) {
  const auto sol = tow::segment_value(tow::build_segment(2, 0, 2, 1));
  EXPECT_EQ(sol.case_label, SegmentCase::b);
  EXPECT_FALSE(sol.family_j_range);
  expect_values(sol.values, {0, 1, 2, 2}, 1e-12);
}

TEST(SegmentValue, CaseC) {
  const auto sol = tow::segment_value(tow::build_segment(3, 0, 0, 1));
  EXPECT_EQ(sol.case_label, SegmentCase::c);
  ASSERT_TRUE(sol.k);
  EXPECT_EQ(*sol.k, 1);
  expect_values(sol.values, {0, 1, 2, 1, 0}, 1e-12);
}

TEST(SegmentValue, BoundaryFamilies) {
  // Q = n + 1.
  auto sol = tow::segment_value(tow::build_segment(3, 0, 4, 1));
  EXPECT_EQ(sol.case_label, SegmentCase::b);
  ASSERT_TRUE(sol.family_j_range);
  EXPECT_EQ(sol.family_j_range->lo, 0);
  EXPECT_EQ(sol.family_j_range->hi, 3);
  expect_values(sol.values, {0, 1, 2, 3, 4}, 1e-12);

  // Q = 2k - n + 1 with n = 5, k = 3.
  sol = tow::segment_value(tow::build_segment(5, 0, 2, 1));
  EXPECT_EQ(sol.case_label, SegmentCase::c);
  EXPECT_EQ(*sol.k, 3);
  EXPECT_EQ(sol.family_j_range->hi, 3);

  // Same boundary up to round-off.
  sol = tow::segment_value(tow::build_segment(5, 0, 0.2 + 0.1 * 0, 0.1));
  EXPECT_EQ(sol.case_label, SegmentCase::c);
  EXPECT_EQ(*sol.k, 3);
  EXPECT_TRUE(sol.family_j_range);

  // Strictly inside an interval there is no family.
  sol = tow::segment_value(tow::build_segment(5, 0, 1.5, 1));
  EXPECT_EQ(*sol.k, 3);
  EXPECT_FALSE(sol.family_j_range);
}

TEST(SegmentValue, NEqualsOne) {
  for (double f1 : {0.0, 0.5, 1.0, 2.0, 2.5, 7.0}) {
    const auto spec = tow::build_segment(1, 0, f1, 1);
    const auto sol = tow::segment_value(spec);
    EXPECT_NE(sol.case_label, SegmentCase::c);
    EXPECT_LE(tow::max_abs_residual(spec, sol.values), 1e-12) << f1;
  }
}

TEST(SegmentValue, MatchesJacobiOracle) {
  for (long n = 1; n <= 12; ++n) {
    for (double eps : {0.3, 1.0, 2.0}) {
      for (int qi = 0; qi <= 4 * (n + 3); ++qi) {
        const double q = 0.25 * qi;
        const auto spec = tow::build_segment(n, -1.0, -1.0 + q * eps, eps);
        const auto sol = tow::segment_value(spec);
        const auto ref = oracle::jacobi_value(oracle::raw(spec));
        for (std::size_t i = 0; i < ref.size(); ++i)
          ASSERT_NEAR(sol.values[i], ref[i], 1e-8) << "n=" << n << " eps=" << eps << " Q=" << q;
      }
    }
  }
}

TEST(SegmentValue, MirrorSymmetry) {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> pay(-20, 20);
  for (int t = 0; t < 300; ++t) {
    const long n = 1 + t % 15;
    const double a = pay(rng), b = pay(rng);
    const auto fwd = tow::segment_value(tow::build_segment(n, a, b, 1.0));
    const auto rev = tow::segment_value(tow::build_segment(n, b, a, 1.0));
    for (long i = 0; i <= n + 1; ++i) EXPECT_EQ(fwd.values[i], rev.values[n + 1 - i]);
    EXPECT_EQ(fwd.case_label, rev.case_label);
  }
}

TEST(SegmentValue, RejectsNonSegment) {
  EXPECT_THROW(tow::segment_value(tow::build_star({2, 2, 2}, {0, 0, 6}, 1)), tow::InvalidArgument);
}

TEST(SegmentStrategies, DefaultPairs) {
  const auto a = tow::segment_strategies(tow::segment_value(tow::build_segment(2, 0, 30, 1)));
  for (tow::NodeId i : {1u, 2u}) {
    EXPECT_FALSE(a.player1[i].lets());
    EXPECT_EQ(a.player1[i].target, i + 1);
    EXPECT_EQ(a.player2[i], i - 1);
  }
  const auto b = tow::segment_strategies(tow::segment_value(tow::build_segment(2, 0, 2, 1)));
  for (tow::NodeId i : {1u, 2u}) {
    EXPECT_TRUE(b.player1[i].lets());
    EXPECT_EQ(b.player2[i], i - 1);
  }
  const auto csol = tow::segment_value(tow::build_segment(4, 0, 1, 1));
  ASSERT_EQ(csol.case_label, SegmentCase::c);
  const long k = *csol.k;
  const auto c = tow::segment_strategies(csol);
  for (long i = 1; i <= 4; ++i) {
    EXPECT_TRUE(c.player1[i].lets());
    EXPECT_EQ(static_cast<long>(c.player2[i]), i <= k ? i - 1 : i + 1);
  }
}

TEST(SegmentStrategies, MirroredSegment) {
  const auto spec = tow::build_segment(3, 4, 0, 1);
  const auto sol = tow::segment_value(spec);
  EXPECT_TRUE(sol.mirrored);
  const auto pair = tow::segment_strategies(sol);
  // Player II heads for the cheap end, which is now node 4.
  for (tow::NodeId i = 1; i <= 3; ++i) EXPECT_EQ(pair.player2[i], i + 1);
  const auto ex = tow::exact_expected(spec, pair);
  ASSERT_TRUE(std::holds_alternative<tow::ValueFunction>(ex));
  expect_values(std::get<tow::ValueFunction>(ex), sol.values, 1e-12);
}

TEST(SegmentStrategies, FamilyRangeIsEnforced) {
  const auto sol = tow::segment_value(tow::build_segment(3, 0, 4, 1));
  EXPECT_NO_THROW(tow::segment_strategies(sol, 0));
  EXPECT_NO_THROW(tow::segment_strategies(sol, 3));
  EXPECT_THROW(tow::segment_strategies(sol, 4), tow::InvalidArgument);
  EXPECT_THROW(tow::segment_strategies(sol, -1), tow::InvalidArgument);
  const auto inner = tow::segment_value(tow::build_segment(3, 0, 3.5, 1));
  EXPECT_THROW(tow::segment_strategies(inner, 0), tow::InvalidArgument);
}

TEST(SegmentStrategies, EveryFamilyMemberRealizesTheValue) {
  for (long n = 1; n <= 9; ++n) {
    for (long m = -n - 1; m <= n + 1; ++m) {
      const double q = static_cast<double>(std::abs(m));
      const auto spec = tow::build_segment(n, 0, m < 0 ? -q : q, 1.0);
      const auto sol = tow::segment_value(spec);
      std::vector<std::optional<long>> members{std::nullopt};
      if (sol.family_j_range)
        for (long j = sol.family_j_range->lo; j <= sol.family_j_range->hi; ++j) members.push_back(j);
      for (auto j : members) {
        const auto ex = tow::exact_expected(spec, tow::segment_strategies(sol, j));
        ASSERT_TRUE(std::holds_alternative<tow::ValueFunction>(ex));
        expect_values(std::get<tow::ValueFunction>(ex), sol.values, 1e-9);
      }
    }
  }
}

TEST(StarValue, HandSolvedYs) {
  auto r = tow::star_value(tow::build_star({1, 1, 1}, {0, 0, 6}, 1));
  EXPECT_NEAR(r.values[0], 3.0, 1e-12);
  EXPECT_LE(r.hub_residual, 1e-12);
  r = tow::star_value(tow::build_star({1, 1, 1}, {0, 0, 0}, 1));
  EXPECT_NEAR(r.values[0], 1.0, 1e-12);
}

TEST(StarValue, TwoArmsMatchSegment) {
  const auto star = tow::star_value(tow::build_star({2, 3}, {0, 2}, 1));
  const auto seg = tow::segment_value(tow::build_segment(4, 0, 2, 1));
  // Star labels: hub 0, arm 0 = {1, 2}, arm 1 = {3, 4, 5}. Segment order:
  // terminal 2, node 1, hub, 3, 4, terminal 5.
  const std::vector<tow::NodeId> order{2, 1, 0, 3, 4, 5};
  for (std::size_t s = 0; s < order.size(); ++s) EXPECT_EQ(star.values[order[s]], seg.values[s]);
}

TEST(StarValue, MatchesOracleOnRandomStars) {
  std::mt19937_64 rng(59);
  std::uniform_int_distribution<long> len(1, 5), arms(2, 5);
  std::uniform_real_distribution<double> pay(-10, 10);
  for (int t = 0; t < 150; ++t) {
    std::vector<long> lengths(static_cast<std::size_t>(arms(rng)));
    std::vector<double> payoffs(lengths.size());
    for (auto& l : lengths) l = len(rng);
    for (auto& p : payoffs) p = pay(rng);
    const auto spec = tow::build_star(lengths, payoffs, t % 2 ? 0.5 : 1.0);
    const auto r = tow::star_value(spec);
    const auto ref = oracle::jacobi_value(oracle::raw(spec));
    for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(r.values[i], ref[i], 1e-8) << "trial " << t;
    const long k = static_cast<long>(lengths.size());
    EXPECT_LE(r.trials, k * (k - 1) / 2);
    EXPECT_LE(r.hub_residual, 1e-9);
  }
}

TEST(StarValue, ReportsFailureWithPerPairResiduals) {
  try {
    tow::star_value(tow::build_star({1, 2, 1, 3}, {0, 1, 2, 3}, 1), -1.0);
    FAIL();
  } catch (const tow::AlgorithmFailure& e) {
    EXPECT_EQ(e.diagnostics().size(), 6u);
  }
  EXPECT_THROW(tow::star_value(tow::build_segment(3, 0, 1, 1)), tow::InvalidArgument);
}

}  // namespace
