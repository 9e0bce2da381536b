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

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tow/dpp.hpp"
#include "tow/errors.hpp"
#include "tow/game_sim.hpp"
#include "tow/graph.hpp"

namespace tow {

/// Regimes of the segment game, by Q = (F_{n+1} - F_0) / eps with F_0 <= F_{n+1}:
///   a: Q > n+1             classical tug-of-war, linear values
///   b: n-1 < Q <= n+1      Player I always lets, Player II walks to x_0
///   c: 2k-n-1 < Q <= 2k-n+1 for some k in [1, n-1]
///                          Player I always lets, Player II splits at k
enum class SegmentCase { a, b, c };

inline char case_letter(SegmentCase c) { return c == SegmentCase::a ? 'a' : c == SegmentCase::b ? 'b' : 'c'; }

struct IndexRange {
  long lo = 0;
  long hi = 0;
  bool contains(long j) const { return lo <= j && j <= hi; }
};

struct SegmentSolution {
  ValueFunction values;  ///< in the caller's labeling (mirror undone)
  double q = 0.0;
  SegmentCase case_label = SegmentCase::a;
  std::optional<long> k;
  std::optional<IndexRange> family_j_range;
  bool mirrored = false;
  double eps = 1.0;

  long n() const { return static_cast<long>(values.size()) - 2; }
};

/// Integers within this distance of Q count as case boundaries.
inline constexpr double kCaseBoundaryTol = 1e-12;

namespace detail {

inline SegmentLayout require_segment(const GameSpec& spec) {
  auto layout = segment_layout(spec);
  if (!layout) throw InvalidArgument("game graph is not a segment 0..n+1");
  if (!(spec.eps > 0.0)) throw InvalidArgument("eps must be positive");
  return *layout;
}

inline bool near_integer(double q, double m) { return std::abs(q - m) <= kCaseBoundaryTol; }

}  // namespace detail

/// Q = (F_{n+1} - F_0) / eps after orienting the segment so F_0 <= F_{n+1}.
inline double q_parameter(const GameSpec& spec) {
  const SegmentLayout s = detail::require_segment(spec);
  return std::abs(s.fn1 - s.f0) / spec.eps;
}

/// Value of the segment game in closed form, with the regime and the
/// strategy-family data for boundary values of Q.
///
/// For n = 1 only regimes a and b exist; Q = 0 uses the b formula.
inline SegmentSolution segment_value(const GameSpec& spec) {
  const SegmentLayout s = detail::require_segment(spec);
  const long n = s.n;
  const double eps = spec.eps;

  SegmentSolution sol;
  sol.eps = eps;
  sol.mirrored = s.f0 > s.fn1;
  const double f0 = std::min(s.f0, s.fn1);
  const double f1 = std::max(s.f0, s.fn1);
  const double q = (f1 - f0) / eps;
  sol.q = q;
  const double nd = static_cast<double>(n);

  ValueFunction u(static_cast<std::size_t>(n) + 2);
  u.front() = f0;
  u.back() = f1;
  if (q > nd + 1.0 && !detail::near_integer(q, nd + 1.0)) {
    sol.case_label = SegmentCase::a;
    for (long i = 1; i <= n; ++i) {
      const double w = static_cast<double>(i) / (nd + 1.0);
      u[i] = (1.0 - w) * f0 + w * f1;
    }
  } else if (n == 1 || (q > nd - 1.0 && !detail::near_integer(q, nd - 1.0))) {
    sol.case_label = SegmentCase::b;
    for (long i = 1; i <= n; ++i) u[i] = f0 + static_cast<double>(i) * eps;
    if (detail::near_integer(q, nd + 1.0)) sol.family_j_range = IndexRange{0, n};
  } else {
    sol.case_label = SegmentCase::c;
    // 2k - n - 1 < Q <= 2k - n + 1  <=>  k = ceil((Q + n - 1) / 2), with Q
    // snapped onto the upper end of its interval when within tolerance.
    const double r = std::round(q);
    const bool on_boundary =
        detail::near_integer(q, r) && (static_cast<long>(r) + n + 1) % 2 == 0;
    long k = on_boundary ? (static_cast<long>(r) + n - 1) / 2
                         : static_cast<long>(std::ceil((q + nd - 1.0) / 2.0));
    k = std::clamp(k, 1L, n - 1);
    sol.k = k;
    if (on_boundary) sol.family_j_range = IndexRange{0, std::min(n - 2, k)};
    for (long i = 1; i <= n; ++i)
      u[i] = i <= k ? f0 + static_cast<double>(i) * eps : f1 + static_cast<double>(n + 1 - i) * eps;
  }
  if (sol.mirrored) std::reverse(u.begin(), u.end());
  sol.values = std::move(u);
  return sol;
}

/// Stationary strategies realizing a segment solution.
///
/// Without family_j: case a plays classical tug-of-war everywhere; b and c
/// let Player II move everywhere (toward x_0, or split at k in case c).
/// With family_j (only at boundary Q): case b lets on 1..j and plays
/// classical on j+1..n; case c lets toward x_0 on 1..j, plays classical on
/// j+1..k and lets toward x_{n+1} on k+1..n.
inline StrategyPair segment_strategies(const SegmentSolution& sol, std::optional<long> family_j = {}) {
  const long n = sol.n();
  if (n < 1) throw InvalidArgument("segment solution has no interior nodes");
  if (family_j && (!sol.family_j_range || !sol.family_j_range->contains(*family_j)))
    throw InvalidArgument("family_j outside the family range for this solution");

  // Work in oriented coordinates (F_0 <= F_{n+1}) and map back at the end.
  const auto node = [&](long i) -> NodeId { return static_cast<NodeId>(sol.mirrored ? n + 1 - i : i); };
  const std::size_t size = static_cast<std::size_t>(n) + 2;
  StrategyPair pair{std::vector<PlayerOneAction>(size), std::vector<NodeId>(size, 0)};
  auto let_toward = [&](long i, long to) {
    pair.player1[node(i)] = PlayerOneAction::let_opponent();
    pair.player2[node(i)] = node(to);
  };
  auto classical = [&](long i) {
    pair.player1[node(i)] = PlayerOneAction::pull(node(i + 1));
    pair.player2[node(i)] = node(i - 1);
  };

  switch (sol.case_label) {
    case SegmentCase::a:
      for (long i = 1; i <= n; ++i) classical(i);
      break;
    case SegmentCase::b: {
      const long j = family_j.value_or(n);
      for (long i = 1; i <= n; ++i) i <= j ? let_toward(i, i - 1) : classical(i);
      break;
    }
    case SegmentCase::c: {
      const long k = *sol.k;
      const long j = family_j.value_or(k);
      for (long i = 1; i <= n; ++i) {
        if (i <= j)
          let_toward(i, i - 1);
        else if (i <= k)
          classical(i);
        else
          let_toward(i, i + 1);
      }
      break;
    }
  }
  return pair;
}

struct StarSolution {
  ValueFunction values;
  std::pair<NodeId, NodeId> terminal_pair;  ///< terminals whose connecting segment fixed the hub
  double hub_residual = 0.0;
  long trials = 0;
};

/// Value of a star game by reduction to segments: pick two terminals, solve
/// the segment through the hub, solve every other arm with the hub as a
/// terminal, and accept when the DPP holds at the hub. Pairs are tried by
/// decreasing payoff gap; at most k(k-1)/2 trials.
inline StarSolution star_value(const GameSpec& spec, double hub_tol = 1e-9) {
  require_valid(spec);
  const auto layout = star_layout(spec);
  if (!layout) throw InvalidArgument("game graph is not a star with hub at node 0");
  const GameGraph& g = spec.graph;
  const auto& arms = layout->arms;
  const std::size_t k = arms.size();

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a + 1; b < k; ++b) pairs.emplace_back(a, b);
  auto gap = [&](const std::pair<std::size_t, std::size_t>& p) {
    return std::abs(g.payoff(arms[p.first].terminal()) - g.payoff(arms[p.second].terminal()));
  };
  std::stable_sort(pairs.begin(), pairs.end(), [&](const auto& x, const auto& y) { return gap(x) > gap(y); });

  std::vector<double> residuals;
  long trials = 0;
  for (auto [a, b] : pairs) {
    ++trials;
    ValueFunction u(g.size(), 0.0);
    for (NodeId t : g.terminals()) u[t] = g.payoff(t);

    // Segment: terminal of a, arm a inward, hub, arm b outward, terminal of b.
    const long len_a = arms[a].length(), len_b = arms[b].length();
    const GameSpec seg = build_segment(len_a + len_b - 1, g.payoff(arms[a].terminal()),
                                       g.payoff(arms[b].terminal()), spec.eps);
    const ValueFunction sv = segment_value(seg).values;
    for (long s = 0; s < len_a; ++s) u[arms[a].nodes[s]] = sv[len_a - 1 - s];
    u[layout->hub] = sv[len_a];
    for (long s = 0; s < len_b; ++s) u[arms[b].nodes[s]] = sv[len_a + 1 + s];

    for (std::size_t c = 0; c < k; ++c) {
      if (c == a || c == b) continue;
      const long len = arms[c].length();
      if (len == 1) continue;  // hub adjacent to the terminal; nothing to solve
      const GameSpec arm = build_segment(len - 1, u[layout->hub], g.payoff(arms[c].terminal()), spec.eps);
      const ValueFunction av = segment_value(arm).values;
      for (long s = 0; s + 1 < len; ++s) u[arms[c].nodes[s]] = av[s + 1];
    }

    const double r = std::abs(residual(spec, u, layout->hub));
    residuals.push_back(r);
    if (r <= hub_tol) {
      return {std::move(u), {arms[a].terminal(), arms[b].terminal()}, r, trials};
    }
  }
  throw AlgorithmFailure("no terminal pair satisfies the DPP at the hub", std::move(residuals));
}

}  // namespace tow
