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
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "tow/dpp.hpp"
#include "tow/errors.hpp"
#include "tow/graph.hpp"

namespace tow {

/// What Player I does at a node: hand the move to Player II (collecting
/// eps), or play a coin-toss round pulling toward `target` if it wins.
struct PlayerOneAction {
  enum class Kind { let_opponent, pull };
  Kind kind = Kind::let_opponent;
  NodeId target = 0;

  static PlayerOneAction let_opponent() { return {Kind::let_opponent, 0}; }
  static PlayerOneAction pull(NodeId to) { return {Kind::pull, to}; }
  bool lets() const { return kind == Kind::let_opponent; }
  friend bool operator==(const PlayerOneAction&, const PlayerOneAction&) = default;
};

/// Stationary strategies for both players, indexed by node id. Entries at
/// terminal nodes are ignored. Player II uses the same target whether forced
/// to move or winning the toss.
struct StrategyPair {
  std::vector<PlayerOneAction> player1;
  std::vector<NodeId> player2;
};

/// Throws InvalidArgument unless every interior node has actions that point
/// at adjacent nodes.
inline void check_strategy(const GameSpec& spec, const StrategyPair& pair) {
  const GameGraph& g = spec.graph;
  if (pair.player1.size() != g.size() || pair.player2.size() != g.size())
    throw InvalidArgument("strategy pair must have one entry per node");
  for (NodeId i : g.interior()) {
    const auto& a = pair.player1[i];
    if (!a.lets() && !g.adjacent(i, a.target))
      throw InvalidArgument("player I target at node " + std::to_string(i) + " is not a neighbor");
    if (!g.adjacent(i, pair.player2[i]))
      throw InvalidArgument("player II target at node " + std::to_string(i) + " is not a neighbor");
  }
}

/// SplitMix64 (Steele, Lea, Flood 2014). Fixed here so seeded runs
/// reproduce bit-for-bit on every platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Seed for episode `index` of a run seeded with `seed`.
inline std::uint64_t episode_seed(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 a(index);
  SplitMix64 b(seed ^ a());
  return b();
}

struct EpisodeOutcome {
  double terminal_payoff = 0.0;  ///< F at the terminal reached; 0 if truncated
  long k_tau = 0;                ///< turns where Player I let Player II move
  long steps = 0;
  bool terminated = false;

  double total(double eps) const { return terminal_payoff + static_cast<double>(k_tau) * eps; }
};

/// Plays one game from `start` until a terminal node or `max_steps` moves.
inline EpisodeOutcome run_episode(const GameSpec& spec, const StrategyPair& pair, NodeId start,
                                  std::uint64_t rng_seed, long max_steps) {
  const GameGraph& g = spec.graph;
  if (start >= g.size() || g.is_terminal(start)) throw InvalidArgument("start must be an interior node");
  if (max_steps < 1) throw InvalidArgument("max_steps must be >= 1");
  check_strategy(spec, pair);

  SplitMix64 rng(rng_seed);
  EpisodeOutcome out;
  NodeId pos = start;
  while (out.steps < max_steps) {
    const PlayerOneAction& a = pair.player1[pos];
    if (a.lets()) {
      pos = pair.player2[pos];
      ++out.k_tau;
    } else {
      const bool heads = (rng() >> 63) != 0;
      pos = heads ? a.target : pair.player2[pos];
    }
    ++out.steps;
    if (g.is_terminal(pos)) {
      out.terminated = true;
      out.terminal_payoff = g.payoff(pos);
      return out;
    }
  }
  return out;
}

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  long episodes = 0;
  double truncated_fraction = 0.0;
};

/// Monte Carlo estimate of E[F_tau + k_tau eps] from `start`.
///
/// Episode k uses episode_seed(seed, k) and results are reduced in episode
/// order, so the estimate does not depend on `threads`. A positive
/// truncated_fraction means some episodes did not terminate within
/// max_steps and the mean is over the terminated ones only.
inline Estimate estimate(const GameSpec& spec, const StrategyPair& pair, NodeId start, long episodes,
                         std::uint64_t seed, long max_steps, unsigned threads = 1) {
  if (episodes < 1) throw InvalidArgument("episodes must be >= 1");
  if (start >= spec.graph.size() || spec.graph.is_terminal(start))
    throw InvalidArgument("start must be an interior node");
  check_strategy(spec, pair);

  std::vector<EpisodeOutcome> outcomes(static_cast<std::size_t>(episodes));
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k)
      outcomes[k] = run_episode(spec, pair, start, episode_seed(seed, k), max_steps);
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(episodes)));
  if (threads == 1) {
    work(0, outcomes.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (outcomes.size() + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t b = t * chunk, e = std::min(outcomes.size(), b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
    for (auto& th : pool) th.join();
  }

  // Welford: exact for constant samples, so deterministic paths give se = 0.
  double mean = 0.0, m2 = 0.0;
  long n = 0, truncated = 0;
  for (const auto& o : outcomes) {
    if (!o.terminated) {
      ++truncated;
      continue;
    }
    const double x = o.total(spec.eps);
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  Estimate est;
  est.episodes = episodes;
  est.truncated_fraction = static_cast<double>(truncated) / static_cast<double>(episodes);
  if (n == 0) throw EstimateUndefined(est.truncated_fraction);
  est.mean = mean;
  est.std_error = n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
  return est;
}

/// Interior nodes from which the game does not end almost surely.
struct Divergent {
  std::vector<NodeId> nodes;
};

using ExpectedPayoff = std::variant<ValueFunction, Divergent>;

namespace detail {

struct Transition {
  NodeId to;
  double prob;
};

inline std::vector<std::vector<Transition>> transitions(const GameSpec& spec, const StrategyPair& pair) {
  std::vector<std::vector<Transition>> out(spec.graph.size());
  for (NodeId i : spec.graph.interior()) {
    const auto& a = pair.player1[i];
    if (a.lets()) {
      out[i] = {{pair.player2[i], 1.0}};
    } else {
      out[i] = {{a.target, 0.5}, {pair.player2[i], 0.5}};
    }
  }
  return out;
}

}  // namespace detail

/// Expected payoff per start node; nullopt where the game does not end
/// almost surely. Terminal entries hold F.
///
/// A node absorbs almost surely iff every node reachable from it can still
/// reach the terminal set. The absorbing nodes form a closed class, so their
/// values solve a linear system on that class alone.
inline std::vector<std::optional<double>> expected_by_start(const GameSpec& spec, const StrategyPair& pair) {
  check_strategy(spec, pair);
  const GameGraph& g = spec.graph;
  const std::size_t n = g.size();
  const auto trans = detail::transitions(spec, pair);

  // Backward reachability of the terminal set.
  std::vector<std::vector<NodeId>> preds(n);
  for (NodeId i : g.interior())
    for (auto t : trans[i]) preds[t.to].push_back(i);
  std::vector<bool> can_reach(n, false);
  std::vector<NodeId> stack;
  for (NodeId t : g.terminals()) {
    can_reach[t] = true;
    stack.push_back(t);
  }
  while (!stack.empty()) {
    NodeId x = stack.back();
    stack.pop_back();
    for (NodeId p : preds[x])
      if (!can_reach[p]) {
        can_reach[p] = true;
        stack.push_back(p);
      }
  }
  // A node is bad if it cannot reach a terminal or can reach a bad node.
  std::vector<bool> bad(n, false);
  for (NodeId i : g.interior())
    if (!can_reach[i]) {
      bad[i] = true;
      stack.push_back(i);
    }
  while (!stack.empty()) {
    NodeId x = stack.back();
    stack.pop_back();
    for (NodeId p : preds[x])
      if (!bad[p]) {
        bad[p] = true;
        stack.push_back(p);
      }
  }

  std::vector<long> slot(n, -1);
  long m = 0;
  for (NodeId i : g.interior())
    if (!bad[i]) slot[i] = m++;

  std::vector<std::optional<double>> out(n);
  for (NodeId t : g.terminals()) out[t] = g.payoff(t);
  if (m == 0) return out;

  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(m, m);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
  for (NodeId i : g.interior()) {
    if (slot[i] < 0) continue;
    const long r = slot[i];
    if (pair.player1[i].lets()) b(r) += spec.eps;
    for (auto t : trans[i]) {
      if (g.is_terminal(t.to))
        b(r) += t.prob * g.payoff(t.to);
      else
        a(r, slot[t.to]) -= t.prob;
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible()) throw InvariantViolation("absorbing-chain system is singular");
  const Eigen::VectorXd x = lu.solve(b);
  for (NodeId i : g.interior())
    if (slot[i] >= 0) out[i] = x(slot[i]);
  return out;
}

/// Exact E[F_tau + k_tau eps] at every node, or the list of interior nodes
/// from which the game may run forever.
inline ExpectedPayoff exact_expected(const GameSpec& spec, const StrategyPair& pair) {
  const auto per_node = expected_by_start(spec, pair);
  Divergent div;
  ValueFunction values(per_node.size());
  for (NodeId i = 0; i < per_node.size(); ++i) {
    if (per_node[i])
      values[i] = *per_node[i];
    else
      div.nodes.push_back(i);
  }
  if (!div.nodes.empty()) return div;
  return values;
}

struct BruteForceResult {
  ValueFunction maximin;  ///< sup over S_I of inf over S_II, per start node
  ValueFunction minimax;  ///< inf over S_II of sup over S_I, per start node
  long pairs_evaluated = 0;

  /// Whether maximin and minimax agree to within tol at every node.
  bool has_value(double tol) const {
    for (std::size_t i = 0; i < maximin.size(); ++i)
      if (!(std::abs(maximin[i] - minimax[i]) <= tol)) return false;
    return true;
  }
};

/// Exhaustive maximin and minimax over stationary strategy pairs.
///
/// A pair that does not end almost surely from x scores -inf for Player I
/// and +inf for Player II at x. Player I ranges over {let} + neighbors at
/// each interior node, Player II over neighbors.
inline BruteForceResult brute_force_value(const GameSpec& spec, std::size_t max_interior = 6) {
  require_valid(spec);
  const GameGraph& g = spec.graph;
  const auto interior = g.interior();
  if (interior.size() > max_interior)
    throw InvalidArgument("brute force limited to " + std::to_string(max_interior) + " interior nodes");

  // Mixed-radix enumeration. Player I digit 0 = let, d>0 = pull to neighbor d-1.
  std::size_t count1 = 1, count2 = 1;
  for (NodeId i : interior) {
    count1 *= g.degree(i) + 1;
    count2 *= g.degree(i);
  }
  StrategyPair pair{std::vector<PlayerOneAction>(g.size()), std::vector<NodeId>(g.size(), 0)};
  auto decode1 = [&](std::size_t code) {
    for (NodeId i : interior) {
      const std::size_t radix = g.degree(i) + 1, d = code % radix;
      code /= radix;
      pair.player1[i] = d == 0 ? PlayerOneAction::let_opponent() : PlayerOneAction::pull(g.neighbors(i)[d - 1]);
    }
  };
  auto decode2 = [&](std::size_t code) {
    for (NodeId i : interior) {
      const std::size_t radix = g.degree(i);
      pair.player2[i] = g.neighbors(i)[code % radix];
      code /= radix;
    }
  };

  constexpr double inf = std::numeric_limits<double>::infinity();
  // table[s1][s2][node]; nullopt = divergent from that node.
  std::vector<std::vector<std::vector<std::optional<double>>>> table(count1);
  for (std::size_t s1 = 0; s1 < count1; ++s1) {
    decode1(s1);
    table[s1].resize(count2);
    for (std::size_t s2 = 0; s2 < count2; ++s2) {
      decode2(s2);
      table[s1][s2] = expected_by_start(spec, pair);
    }
  }

  BruteForceResult out;
  out.pairs_evaluated = static_cast<long>(count1 * count2);
  out.maximin.assign(g.size(), 0.0);
  out.minimax.assign(g.size(), 0.0);
  for (NodeId t : g.terminals()) out.maximin[t] = out.minimax[t] = g.payoff(t);
  for (NodeId x : interior) {
    double best = -inf;
    for (std::size_t s1 = 0; s1 < count1; ++s1) {
      double worst = inf;
      for (std::size_t s2 = 0; s2 < count2; ++s2) {
        const auto& v = table[s1][s2][x];
        worst = std::min(worst, v ? *v : -inf);
      }
      best = std::max(best, worst);
    }
    out.maximin[x] = best;

    double lowest = inf;
    for (std::size_t s2 = 0; s2 < count2; ++s2) {
      double top = -inf;
      for (std::size_t s1 = 0; s1 < count1; ++s1) {
        const auto& v = table[s1][s2][x];
        top = std::max(top, v ? *v : inf);
      }
      lowest = std::min(lowest, top);
    }
    out.minimax[x] = lowest;
  }
  return out;
}

}  // namespace tow
