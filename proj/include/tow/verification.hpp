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
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "tow/dpp.hpp"
#include "tow/errors.hpp"
#include "tow/graph.hpp"

namespace tow {

enum class SolutionKind { solution, subsolution, supersolution, neither };

inline std::string_view to_string(SolutionKind k) {
  switch (k) {
    case SolutionKind::solution: return "solution";
    case SolutionKind::subsolution: return "subsolution";
    case SolutionKind::supersolution: return "supersolution";
    case SolutionKind::neither: return "neither";
  }
  return "neither";
}

struct Classification {
  SolutionKind kind = SolutionKind::neither;
  /// G^i[u] for each interior node, in graph.interior() order.
  std::vector<double> residuals;

  bool is_subsolution() const {
    return kind == SolutionKind::solution || kind == SolutionKind::subsolution;
  }
  bool is_supersolution() const {
    return kind == SolutionKind::solution || kind == SolutionKind::supersolution;
  }
};

/// Sub/supersolution test of u against G^i with tolerance tol.
inline Classification classify(const GameSpec& spec, const ValueFunction& u, double tol) {
  if (u.size() != spec.graph.size()) throw InvalidArgument("value function size does not match graph");
  Classification c;
  bool sub = true, super = true;
  for (NodeId i : spec.graph.interior()) {
    const double r = residual(spec, u, i);
    c.residuals.push_back(r);
    sub = sub && r <= tol;
    super = super && r >= -tol;
  }
  c.kind = sub && super ? SolutionKind::solution
           : sub        ? SolutionKind::subsolution
           : super      ? SolutionKind::supersolution
                        : SolutionKind::neither;
  return c;
}

struct StrictifyResult {
  ValueFunction tilde_values;
  double mu = 0.0;
  double delta = 0.0;
  double gamma_bound = 0.0;
  double c = 0.0;  ///< max over interior nodes of |v_i|
  double d = 0.0;  ///< |min over terminal nodes of v_i|
};

/// g(a) = (1 + delta) a - delta / (4C) a^2.
inline double strictify_transform(double a, double delta, double c) {
  return (1.0 + delta) * a - delta / (4.0 * c) * a * a;
}

/// Turns a supersolution v into a strict one, g(v), with
/// G^i[g(v)] >= mu = (delta/2) eps min{1, eps/(4C)} at every interior node.
///
/// g is applied at every node, terminals included, since the neighbor
/// differences at a node next to the boundary involve terminal values.
/// The displacement bound is delta * max{(3/4) C, D (1 + D/(4C))} when no
/// node exceeds C. A terminal value M above C replaces the (3/4) C term by
/// max{C, M (M/(4C) - 1)}: g(a) - a peaks at delta C at a = 2C and turns
/// negative past 4C.
inline StrictifyResult strictify(const GameSpec& spec, const ValueFunction& v, double delta,
                                 double tol = 1e-12) {
  if (!(delta > 0.0)) throw InvalidArgument("delta must be positive");
  const GameGraph& g = spec.graph;
  Classification cls = classify(spec, v, tol);
  if (!cls.is_supersolution()) {
    std::vector<NodeId> bad;
    for (std::size_t k = 0; k < cls.residuals.size(); ++k)
      if (cls.residuals[k] < -tol) bad.push_back(g.interior()[k]);
    throw PreconditionViolation("strictify requires a supersolution", std::move(bad));
  }

  StrictifyResult out;
  out.delta = delta;
  for (NodeId i : g.interior()) out.c = std::max(out.c, std::abs(v[i]));
  if (out.c == 0.0) throw DegenerateInput("strictify undefined: v vanishes on every interior node");
  double min_terminal = std::numeric_limits<double>::infinity();
  double max_any = -std::numeric_limits<double>::infinity();
  for (NodeId t : g.terminals()) min_terminal = std::min(min_terminal, v[t]);
  for (double x : v) max_any = std::max(max_any, x);
  out.d = std::abs(min_terminal);

  const double eps = spec.eps;
  out.mu = 0.5 * delta * eps * std::min(1.0, eps / (4.0 * out.c));
  const double upper_term =
      max_any <= out.c ? 0.75 * out.c : std::max(out.c, max_any * (max_any / (4.0 * out.c) - 1.0));
  out.gamma_bound = delta * std::max(upper_term, out.d * (1.0 + out.d / (4.0 * out.c)));

  out.tilde_values.resize(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    out.tilde_values[i] = strictify_transform(v[i], delta, out.c);

  const double slack = 1e-12 * (1.0 + out.c);
  std::vector<NodeId> failed;
  for (NodeId i : g.interior())
    if (residual(spec, out.tilde_values, i) < out.mu - slack) failed.push_back(i);
  for (NodeId i = 0; i < v.size(); ++i) {
    const double shift = out.tilde_values[i] - v[i];
    if (shift > out.gamma_bound + slack || (g.is_terminal(i) && shift < -out.gamma_bound - slack))
      failed.push_back(i);
  }
  if (!failed.empty())
    throw InvariantViolation("strictify postcondition failed at " + std::to_string(failed.size()) +
                             " node(s); delta may be too large");
  return out;
}

/// Checks u_i <= v_i + tol everywhere for a subsolution u and supersolution
/// v ordered on the terminals. A false return contradicts the comparison
/// principle.
inline bool comparison_test(const GameSpec& spec, const ValueFunction& u, const ValueFunction& v,
                            double tol) {
  const GameGraph& g = spec.graph;
  const Classification cu = classify(spec, u, tol);
  const Classification cv = classify(spec, v, tol);
  if (v.size() != g.size()) throw InvalidArgument("value function size does not match graph");
  std::vector<NodeId> bad;
  for (std::size_t k = 0; k < g.interior().size(); ++k)
    if (cu.residuals[k] > tol || cv.residuals[k] < -tol) bad.push_back(g.interior()[k]);
  for (NodeId t : g.terminals())
    if (u[t] > v[t] + tol) bad.push_back(t);
  if (!bad.empty()) {
    std::sort(bad.begin(), bad.end());
    bad.erase(std::unique(bad.begin(), bad.end()), bad.end());
    throw PreconditionViolation(
        "comparison_test requires a subsolution u, a supersolution v and u <= v on terminals",
        std::move(bad));
  }
  for (NodeId i = 0; i < g.size(); ++i)
    if (u[i] > v[i] + tol) return false;
  return true;
}

}  // namespace tow
