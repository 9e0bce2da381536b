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

#include "oracles.hpp"
#include "tow/dpp.hpp"

namespace {

using tow::GameGraph;
using tow::GameSpec;

// Interior node 1 with terminal neighbors 0 and 2.
GameSpec three_node(double f0, double f2, double eps) { return tow::build_segment(1, f0, f2, eps); }

TEST(DppApply, FlatNeighborhood) {
  const auto s = three_node(0, 0, 1);
  EXPECT_EQ(tow::dpp_apply(s, {0, 123, 0}, 1), 1.0);
}

TEST(DppApply, MidpointBranch) {
  const auto s = three_node(0, 20, 1);
  EXPECT_EQ(tow::dpp_apply(s, {0, 0, 20}, 1), 10.0);
}

TEST(DppApply, BranchesTie) {
  const auto s = three_node(0, 2, 1);
  EXPECT_EQ(tow::dpp_apply(s, {0, 0, 2}, 1), 1.0);
}

TEST(DppApply, RejectsTerminalAndSizeMismatch) {
  const auto s = three_node(0, 2, 1);
  EXPECT_THROW(tow::dpp_apply(s, {0, 0, 2}, 0), tow::InvalidArgument);
  EXPECT_THROW(tow::dpp_apply(s, {0, 0}, 1), tow::InvalidArgument);
  EXPECT_THROW(tow::residual(s, {0, 0, 2}, 7), tow::InvalidArgument);
}

TEST(Residual, Examples) {
  const auto s = three_node(0, 0, 1);
  EXPECT_EQ(tow::residual(s, {0, 1, 0}, 1), 0.0);
  EXPECT_EQ(tow::residual(s, {0, 0, 0}, 1), -1.0);
  EXPECT_EQ(tow::residual(s, {0, 2, 0}, 1), 1.0);
}

TEST(Residual, SignMatchesFixedPointGap) {
  // G^i[u] and u_i - T(u)_i share their sign, with G^i = 0 iff u_i = T(u)_i.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-5, 5);
  for (int t = 0; t < 500; ++t) {
    const auto s = oracle::random_graph(rng, 6, 0.7);
    tow::ValueFunction u(s.graph.size());
    for (auto& x : u) x = d(rng);
    for (auto i : s.graph.interior()) {
      const double r = tow::residual(s, u, i), gap = u[i] - tow::dpp_apply(s, u, i);
      EXPECT_EQ(r > 0, gap > 0);
      EXPECT_EQ(r < 0, gap < 0);
    }
  }
}

TEST(Properties, MonotoneAndAdditivelyInvariant) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> d(-10, 10), bump(0, 3);
  for (int t = 0; t < 500; ++t) {
    const auto s = oracle::random_graph(rng, 2 + t % 9, 0.25 + 0.25 * (t % 4));
    tow::ValueFunction u(s.graph.size()), v(s.graph.size()), w(s.graph.size());
    const double c = d(rng);
    for (std::size_t i = 0; i < u.size(); ++i) {
      u[i] = d(rng);
      v[i] = u[i] + bump(rng);
      w[i] = u[i] + c;
    }
    for (auto i : s.graph.interior()) {
      EXPECT_LE(tow::dpp_apply(s, u, i), tow::dpp_apply(s, v, i));
      EXPECT_NEAR(tow::dpp_apply(s, w, i), tow::dpp_apply(s, u, i) + c, 1e-12);
    }
  }
}

TEST(Barriers, TerminalsGetPlusMinusK) {
  const auto s = tow::build_star({2, 3, 1}, {-4, 2, 7}, 0.5);
  const auto b = tow::barrier_bounds(s);
  for (auto t : s.graph.terminals()) {
    EXPECT_EQ(b.lower[t], -7.0);
    EXPECT_EQ(b.upper[t], 7.0);
  }
}

TEST(Barriers, SegmentFormula) {
  for (long n = 1; n <= 12; ++n) {
    const auto s = tow::build_segment(n, -3, 5, 1.5);
    const auto b = tow::barrier_bounds(s);
    for (long i = 0; i <= n + 1; ++i) {
      const double base = 1.5 * static_cast<double>(std::min(i, n + 1 - i));
      EXPECT_EQ(b.lower[i], base - 5);
      EXPECT_EQ(b.upper[i], base + 5);
    }
  }
}

TEST(Barriers, UpperIsSuperLowerIsSubOnRandomGraphs) {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 300; ++t) {
    const auto s = oracle::random_graph(rng, 2 + t % 12, 0.5, 10.0, t % 5);
    const auto b = tow::barrier_bounds(s);
    auto up = b.upper, lo = b.lower;
    for (auto x : s.graph.terminals()) up[x] = lo[x] = s.graph.payoff(x);
    for (auto i : s.graph.interior()) {
      EXPECT_GE(tow::residual(s, up, i), -1e-12);
      EXPECT_LE(tow::residual(s, lo, i), 1e-12);
    }
  }
}

TEST(Solve, Examples) {
  auto r = tow::solve(tow::build_segment(1, 0, 10, 1));
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.values[1], 5.0, 1e-9);

  r = tow::solve(tow::build_segment(2, 0, 30, 1));
  ASSERT_TRUE(r.converged);
  const std::vector<double> a{0, 10, 20, 30};
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(r.values[i], a[i], 1e-9);

  r = tow::solve(tow::build_segment(2, 0, 2, 1));
  ASSERT_TRUE(r.converged);
  const std::vector<double> b{0, 1, 2, 2};
  for (std::size_t i = 0; i < b.size(); ++i) EXPECT_NEAR(r.values[i], b[i], 1e-9);
}

TEST(Solve, MatchesJacobiOracleOnRandomGraphs) {
  std::mt19937_64 rng(29);
  for (int t = 0; t < 200; ++t) {
    const auto s = oracle::random_graph(rng, 2 + t % 10, 0.3 + 0.1 * (t % 7), 10.0, t % 4);
    const auto r = tow::solve(s, {1e-12, 1'000'000});
    ASSERT_TRUE(r.converged);
    const auto ref = oracle::jacobi_value(oracle::raw(s));
    for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(r.values[i], ref[i], 1e-8) << "trial " << t;
  }
}

TEST(Solve, ConvergedOutputHasSmallResidualAndStaysInBarriers) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 200; ++t) {
    const auto s = oracle::random_graph(rng, 2 + t % 15, 1.0, 10.0, t % 6);
    const tow::SolveOptions opts{1e-10, 1'000'000};
    const auto r = tow::solve(s, opts);
    ASSERT_TRUE(r.converged);
    EXPECT_LE(tow::max_abs_residual(s, r.values), 10 * opts.tol);
    const auto b = tow::barrier_bounds(s);
    for (std::size_t i = 0; i < r.values.size(); ++i) {
      EXPECT_GE(r.values[i], b.lower[i] - 1e-12);
      EXPECT_LE(r.values[i], b.upper[i] + 1e-12);
    }
    for (auto x : s.graph.terminals()) EXPECT_EQ(r.values[x], s.graph.payoff(x));
  }
}

TEST(Solve, IteratesAreNonIncreasing) {
  const auto s = tow::build_star({3, 2, 4}, {0, 9, -3}, 0.5);
  tow::ValueFunction prev = tow::solve(s, {1e-10, 1}).values;
  for (long k = 2; k <= 40; ++k) {
    const auto cur = tow::solve(s, {1e-10, k}).values;
    for (std::size_t i = 0; i < cur.size(); ++i) EXPECT_LE(cur[i], prev[i]);
    prev = cur;
  }
}

TEST(Solve, ReportsNonConvergence) {
  const auto r = tow::solve(tow::build_segment(30, 0, 3.7, 1), {1e-10, 2});
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 2);
  EXPECT_GT(r.max_residual, 1e-10);
}

TEST(Solve, RejectsInvalidSpecAndTolerance) {
  GameSpec bad{GameGraph(3, {{0, 1}}, {{0, 0.0}}), 1.0};
  EXPECT_THROW(tow::solve(bad), tow::InvalidArgument);
  EXPECT_THROW(tow::solve(tow::build_segment(1, 0, 1, 1), {0.0, 10}), tow::InvalidArgument);
}

TEST(Solve, CyclicGraph) {
  // Square 0-1-2-3-0 with terminal 0 and a pendant terminal 4 on node 2.
  GameSpec s{GameGraph(5, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {2, 4}}, {{0, 0.0}, {4, 6.0}}), 1.0};
  const auto r = tow::solve(s, {1e-12, 100000});
  ASSERT_TRUE(r.converged);
  const auto ref = oracle::jacobi_value(oracle::raw(s));
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(r.values[i], ref[i], 1e-9);
}

}  // namespace
