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
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "tow/errors.hpp"
#include "tow/graph.hpp"

namespace tow {

/// One real value per node, indexed by NodeId.
using ValueFunction = std::vector<double>;

struct Extremes {
  double lo;
  double hi;
};

/// Smallest and largest of u over the given neighbor set.
template <class Values>
Extremes extremes_over(const Values& u, std::span<const NodeId> ids) {
  Extremes e{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (NodeId j : ids) {
    const double v = u[j];
    e.lo = std::min(e.lo, v);
    e.hi = std::max(e.hi, v);
  }
  return e;
}

namespace detail {

inline void check_interior(const GameSpec& spec, const ValueFunction& u, NodeId i) {
  if (i >= spec.graph.size()) throw InvalidArgument("node index out of range");
  if (spec.graph.is_terminal(i)) throw InvalidArgument("node " + std::to_string(i) + " is terminal");
  if (u.size() != spec.graph.size()) throw InvalidArgument("value function size does not match graph");
}

// Right-hand side of the DPP at one node given its neighbor extremes.
inline double dpp_rhs(Extremes e, double eps) {
  return std::max(e.lo + eps, 0.5 * (e.hi + e.lo));
}

inline double dpp_residual(double ui, Extremes e, double eps) {
  return std::min(ui - e.lo - eps, ui - 0.5 * (e.hi + e.lo));
}

}  // namespace detail

/// max{ min_j u_j + eps, (max_j u_j + min_j u_j) / 2 } over the neighbors
/// of interior node i.
inline double dpp_apply(const GameSpec& spec, const ValueFunction& u, NodeId i) {
  detail::check_interior(spec, u, i);
  return detail::dpp_rhs(extremes_over(u, spec.graph.neighbors(i)), spec.eps);
}

/// G^i[u] = min{ u_i - min_j u_j - eps, u_i - (max_j u_j + min_j u_j) / 2 }.
/// Nonpositive for subsolutions, nonnegative for supersolutions.
inline double residual(const GameSpec& spec, const ValueFunction& u, NodeId i) {
  detail::check_interior(spec, u, i);
  return detail::dpp_residual(u[i], extremes_over(u, spec.graph.neighbors(i)), spec.eps);
}

/// max over interior nodes of |G^i[u]|.
inline double max_abs_residual(const GameSpec& spec, const ValueFunction& u) {
  double r = 0.0;
  for (NodeId i : spec.graph.interior()) r = std::max(r, std::abs(residual(spec, u, i)));
  return r;
}

struct Barriers {
  ValueFunction lower;
  ValueFunction upper;
};

/// eps * d_i -/+ K, with d_i the graph distance to the terminal set and
/// K = max |F|. The upper one is a supersolution and the lower one a
/// subsolution of the Dirichlet problem, so every solution lies between them.
inline Barriers barrier_bounds(const GameSpec& spec) {
  require_valid(spec);
  const auto dist = spec.graph.distance_to_terminals();
  const double k = spec.graph.max_abs_payoff();
  Barriers b{ValueFunction(spec.graph.size()), ValueFunction(spec.graph.size())};
  for (NodeId i = 0; i < spec.graph.size(); ++i) {
    const double base = spec.eps * static_cast<double>(*dist[i]);
    b.lower[i] = base - k;
    b.upper[i] = base + k;
  }
  return b;
}

struct SolveOptions {
  double tol = 1e-10;
  long max_iter = 1'000'000;
};

struct SolveReport {
  ValueFunction values;
  long iterations = 0;
  double max_residual = 0.0;
  bool converged = false;
};

/// Solves the discrete Dirichlet problem G^i[u] = 0 on interior nodes,
/// u = F on terminals.
///
/// Gauss-Seidel sweeps in ascending node order, started from the upper
/// barrier. Each sweep is checked to be componentwise non-increasing (up to
/// a few ulps of rounding in the barrier itself). Stops once the largest
/// per-sweep change and the largest |G^i| are both at most tol; otherwise
/// returns converged = false after max_iter sweeps.
inline SolveReport solve(const GameSpec& spec, const SolveOptions& opts = {}) {
  if (!(opts.tol > 0.0)) throw InvalidArgument("tol must be positive");
  Barriers barriers = barrier_bounds(spec);
  const GameGraph& g = spec.graph;

  SolveReport report;
  report.values = std::move(barriers.upper);
  ValueFunction& u = report.values;
  for (NodeId t : g.terminals()) u[t] = g.payoff(t);

  const double scale = g.max_abs_payoff() + spec.eps * static_cast<double>(g.size());
  const double slack = 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + scale);

  for (long it = 1; it <= opts.max_iter; ++it) {
    double change = 0.0;
    for (NodeId i : g.interior()) {
      const double next = detail::dpp_rhs(extremes_over(u, g.neighbors(i)), spec.eps);
      if (next > u[i] + slack)
        throw InvariantViolation("Gauss-Seidel sweep increased node " + std::to_string(i));
      change = std::max(change, std::abs(next - u[i]));
      u[i] = next;
    }
    report.iterations = it;
    if (change <= opts.tol) {
      report.max_residual = max_abs_residual(spec, u);
      if (report.max_residual <= opts.tol) {
        report.converged = true;
        return report;
      }
    }
  }
  report.max_residual = max_abs_residual(spec, u);
  return report;
}

}  // namespace tow
