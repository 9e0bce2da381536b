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
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tow/errors.hpp"

namespace tow {

using Edge = std::pair<NodeId, NodeId>;

/// Finite undirected game graph. Nodes are dense indices 0..N-1; terminal
/// nodes carry a payoff, every other node is interior (running).
///
/// The graph is immutable once built. Construction only rejects what cannot
/// be represented (out-of-range ids, payoffs keyed by a missing node); the
/// structural invariants are reported by validate().
class GameGraph {
 public:
  GameGraph() = default;

  GameGraph(std::size_t node_count, const std::vector<Edge>& edges,
            std::map<NodeId, double> terminal_payoffs)
      : adjacency_(node_count),
        terminal_(node_count, false),
        payoff_(node_count, 0.0) {
    for (auto [a, b] : edges) {
      if (a >= node_count || b >= node_count)
        throw InvalidArgument("edge references node outside 0..N-1");
      adjacency_[a].push_back(b);
      if (a != b) adjacency_[b].push_back(a);
    }
    for (auto& nbrs : adjacency_) {
      std::sort(nbrs.begin(), nbrs.end());
      nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    }
    for (auto [id, value] : terminal_payoffs) {
      if (id >= node_count)
        throw InvalidArgument("payoff references node outside 0..N-1");
      terminal_[id] = true;
      payoff_[id] = value;
    }
    for (NodeId i = 0; i < node_count; ++i)
      (terminal_[i] ? terminals_ : interior_).push_back(i);
  }

  std::size_t size() const { return adjacency_.size(); }
  std::span<const NodeId> neighbors(NodeId i) const { return adjacency_.at(i); }
  std::size_t degree(NodeId i) const { return adjacency_.at(i).size(); }
  bool is_terminal(NodeId i) const { return terminal_.at(i); }
  bool is_interior(NodeId i) const { return !terminal_.at(i); }
  bool adjacent(NodeId i, NodeId j) const {
    const auto& n = adjacency_.at(i);
    return std::binary_search(n.begin(), n.end(), j);
  }

  /// Terminal payoff F_i. Throws for interior nodes.
  double payoff(NodeId i) const {
    if (!is_terminal(i)) throw InvalidArgument("payoff requested at interior node");
    return payoff_[i];
  }

  std::span<const NodeId> interior() const { return interior_; }
  std::span<const NodeId> terminals() const { return terminals_; }

  /// K = max |F_i| over terminal nodes (0 for an empty terminal set).
  double max_abs_payoff() const {
    double k = 0.0;
    for (NodeId t : terminals_) k = std::max(k, std::abs(payoff_[t]));
    return k;
  }

  /// Graph distance from each node to the terminal set; nullopt when no
  /// terminal is reachable.
  std::vector<std::optional<std::size_t>> distance_to_terminals() const {
    std::vector<std::optional<std::size_t>> dist(size());
    std::deque<NodeId> queue;
    for (NodeId t : terminals_) {
      dist[t] = 0;
      queue.push_back(t);
    }
    while (!queue.empty()) {
      NodeId x = queue.front();
      queue.pop_front();
      for (NodeId y : adjacency_[x]) {
        if (!dist[y]) {
          dist[y] = *dist[x] + 1;
          queue.push_back(y);
        }
      }
    }
    return dist;
  }

  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    for (NodeId i = 0; i < size(); ++i)
      for (NodeId j : adjacency_[i])
        if (i <= j) out.emplace_back(i, j);
    return out;
  }

  std::map<NodeId, double> terminal_payoffs() const {
    std::map<NodeId, double> out;
    for (NodeId t : terminals_) out.emplace(t, payoff_[t]);
    return out;
  }

 private:
  std::vector<std::vector<NodeId>> adjacency_;
  std::vector<bool> terminal_;
  std::vector<double> payoff_;
  std::vector<NodeId> interior_;
  std::vector<NodeId> terminals_;
};

/// A complete discrete game: topology, payoffs and the step payment eps.
struct GameSpec {
  GameGraph graph;
  double eps = 1.0;
};

/// Every violated graph/spec invariant, in a stable order. Empty when valid.
inline std::vector<std::string> validate(const GameSpec& spec) {
  std::vector<std::string> errors;
  const GameGraph& g = spec.graph;
  if (!(spec.eps > 0.0) || !std::isfinite(spec.eps)) errors.emplace_back("eps must be positive");
  if (g.terminals().empty()) errors.emplace_back("terminal set is empty");
  for (NodeId i = 0; i < g.size(); ++i)
    if (g.adjacent(i, i)) errors.push_back("self-loop at node " + std::to_string(i));
  for (NodeId t : g.terminals())
    if (!std::isfinite(g.payoff(t)))
      errors.push_back("payoff not finite at terminal node " + std::to_string(t));
  const auto dist = g.distance_to_terminals();
  for (NodeId i : g.interior()) {
    if (g.degree(i) == 0)
      errors.push_back("interior node " + std::to_string(i) + " has no neighbors");
    if (!dist[i])
      errors.push_back("interior node unreachable from terminal set: " + std::to_string(i));
  }
  return errors;
}

/// Throws InvalidArgument listing every violated invariant.
inline void require_valid(const GameSpec& spec) {
  auto errors = validate(spec);
  if (errors.empty()) return;
  std::string msg = "invalid game spec:";
  for (const auto& e : errors) msg += " " + e + ";";
  throw InvalidArgument(msg);
}

/// Path x_0 .. x_{n+1} with n interior nodes and payoffs at both ends.
inline GameSpec build_segment(long n, double f0, double fn1, double eps) {
  if (n < 1) throw InvalidArgument("segment needs n >= 1 interior nodes");
  if (!(eps > 0.0)) throw InvalidArgument("eps must be positive");
  const auto count = static_cast<std::size_t>(n) + 2;
  std::vector<Edge> edges;
  for (NodeId i = 0; i + 1 < count; ++i) edges.emplace_back(i, i + 1);
  return {GameGraph(count, edges, {{0, f0}, {count - 1, fn1}}), eps};
}

/// Star of k >= 2 arms glued at a hub. The hub is node 0; arm a occupies the
/// next length_a indices walking outward, the last of which is its terminal.
inline GameSpec build_star(const std::vector<long>& arm_lengths,
                           const std::vector<double>& arm_payoffs, double eps) {
  if (arm_lengths.size() != arm_payoffs.size())
    throw InvalidArgument("arm_lengths and arm_payoffs differ in length");
  if (arm_lengths.size() < 2) throw InvalidArgument("star needs at least two arms");
  if (!(eps > 0.0)) throw InvalidArgument("eps must be positive");
  std::size_t count = 1;
  for (long len : arm_lengths) {
    if (len < 1) throw InvalidArgument("arm length must be >= 1");
    count += static_cast<std::size_t>(len);
  }
  std::vector<Edge> edges;
  std::map<NodeId, double> payoffs;
  NodeId next = 1;
  for (std::size_t a = 0; a < arm_lengths.size(); ++a) {
    NodeId prev = 0;
    for (long s = 0; s < arm_lengths[a]; ++s) {
      edges.emplace_back(prev, next);
      prev = next++;
    }
    payoffs.emplace(prev, arm_payoffs[a]);
  }
  return {GameGraph(count, edges, std::move(payoffs)), eps};
}

/// Shape of a segment spec as produced by build_segment.
struct SegmentLayout {
  long n = 0;
  double f0 = 0.0;
  double fn1 = 0.0;
};

/// Recognizes the canonical path labeling 0..n+1; nullopt otherwise.
inline std::optional<SegmentLayout> segment_layout(const GameSpec& spec) {
  const GameGraph& g = spec.graph;
  if (g.size() < 3) return std::nullopt;
  const NodeId last = g.size() - 1;
  if (g.terminals().size() != 2 || !g.is_terminal(0) || !g.is_terminal(last)) return std::nullopt;
  for (NodeId i = 0; i <= last; ++i) {
    std::vector<NodeId> expect;
    if (i > 0) expect.push_back(i - 1);
    if (i < last) expect.push_back(i + 1);
    auto nb = g.neighbors(i);
    if (!std::equal(nb.begin(), nb.end(), expect.begin(), expect.end())) return std::nullopt;
  }
  return SegmentLayout{static_cast<long>(last) - 1, g.payoff(0), g.payoff(last)};
}

/// One arm of a star: its nodes from the hub outward, terminal last.
struct StarArm {
  std::vector<NodeId> nodes;
  NodeId terminal() const { return nodes.back(); }
  long length() const { return static_cast<long>(nodes.size()); }
};

struct StarLayout {
  NodeId hub = 0;
  std::vector<StarArm> arms;
};

/// Recovers the arms of a star whose hub is node 0 (the build_star labeling).
inline std::optional<StarLayout> star_layout(const GameSpec& spec) {
  const GameGraph& g = spec.graph;
  if (g.size() < 3 || g.is_terminal(0) || g.degree(0) < 2) return std::nullopt;
  StarLayout layout;
  std::vector<bool> seen(g.size(), false);
  seen[0] = true;
  for (NodeId first : g.neighbors(0)) {
    StarArm arm;
    NodeId prev = 0, cur = first;
    while (true) {
      if (seen[cur]) return std::nullopt;
      seen[cur] = true;
      arm.nodes.push_back(cur);
      if (g.is_terminal(cur)) {
        if (g.degree(cur) != 1) return std::nullopt;
        break;
      }
      if (g.degree(cur) != 2) return std::nullopt;
      auto nb = g.neighbors(cur);
      NodeId nxt = nb[0] == prev ? nb[1] : nb[0];
      prev = cur;
      cur = nxt;
    }
    layout.arms.push_back(std::move(arm));
  }
  if (!std::all_of(seen.begin(), seen.end(), [](bool s) { return s; })) return std::nullopt;
  return layout;
}

}  // namespace tow
