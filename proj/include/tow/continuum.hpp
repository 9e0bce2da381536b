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
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "tow/errors.hpp"

namespace tow {

/// min favors Player I (Jensen's min equation), max favors Player II.
enum class Variant { min, max };

/// Epsilon-ball game on [0, lx] (dim 1) or [0, lx] x [0, ly] (dim 2),
/// sampled on a lattice of spacing h. The extents must be integer multiples
/// of h, so the boundary samples and the closest boundary point of every
/// lattice point are themselves lattice points.
struct GridProblem {
  int dim = 1;
  double lx = 1.0;
  double ly = 1.0;
  double h = 0.01;
  double eps = 0.1;
  double lambda = 1.0;
  std::function<double(double, double)> boundary_payoff = [](double, double) { return 0.0; };
  Variant variant = Variant::min;
};

namespace detail {

inline bool is_multiple(double length, double h) {
  const double r = length / h;
  return std::abs(r - std::round(r)) <= 1e-6 * std::max(1.0, r);
}

}  // namespace detail

/// Every violated GridProblem invariant; empty when valid.
inline std::vector<std::string> validate(const GridProblem& p) {
  std::vector<std::string> errors;
  if (p.dim != 1 && p.dim != 2) errors.emplace_back("dim must be 1 or 2");
  if (!(p.h > 0.0)) errors.emplace_back("h must be positive");
  if (!(p.eps > 0.0)) errors.emplace_back("eps must be positive");
  if (!(p.lambda > 0.0)) errors.emplace_back("lambda must be positive");
  if (!errors.empty()) return errors;
  if (p.h > p.eps / 10.0 * (1.0 + 1e-9)) errors.emplace_back("h must be at most eps/10");
  const double extent = p.dim == 1 ? p.lx : std::min(p.lx, p.ly);
  if (!(p.eps < extent / 2.0)) errors.emplace_back("eps must be below half the smallest domain extent");
  if (!detail::is_multiple(p.lx, p.h) || (p.dim == 2 && !detail::is_multiple(p.ly, p.h)))
    errors.emplace_back("domain extents must be integer multiples of h");
  if (!p.boundary_payoff) errors.emplace_back("boundary payoff is not set");
  return errors;
}

/// Lattice geometry and the ball stencil for a problem.
class Lattice {
 public:
  explicit Lattice(const GridProblem& p) : h_(p.h), eps_(p.eps) {
    auto errors = validate(p);
    if (!errors.empty()) {
      std::string msg = "invalid grid problem:";
      for (const auto& e : errors) msg += " " + e + ";";
      throw InvalidArgument(msg);
    }
    nx_ = static_cast<long>(std::lround(p.lx / p.h)) + 1;
    ny_ = p.dim == 2 ? static_cast<long>(std::lround(p.ly / p.h)) + 1 : 1;
    radius_ = p.eps / p.h;
    const long reach = static_cast<long>(std::floor(radius_ + 1e-9));
    const double r2 = radius_ * radius_ * (1.0 + 1e-12);
    const long reach_y = p.dim == 2 ? reach : 0;
    for (long b = -reach_y; b <= reach_y; ++b)
      for (long a = -reach; a <= reach; ++a)
        if (static_cast<double>(a * a + b * b) <= r2) stencil_.push_back({a, b});
  }

  struct Offset {
    long dx;
    long dy;
  };

  long nx() const { return nx_; }
  long ny() const { return ny_; }
  std::size_t size() const { return static_cast<std::size_t>(nx_ * ny_); }
  double h() const { return h_; }
  std::size_t index(long i, long j) const { return static_cast<std::size_t>(j * nx_ + i); }
  long column(std::size_t p) const { return static_cast<long>(p) % nx_; }
  long row(std::size_t p) const { return static_cast<long>(p) / nx_; }
  double x(std::size_t p) const { return static_cast<double>(column(p)) * h_; }
  double y(std::size_t p) const { return static_cast<double>(row(p)) * h_; }

  bool is_boundary(std::size_t p) const {
    const long i = column(p), j = row(p);
    if (i == 0 || i == nx_ - 1) return true;
    return ny_ > 1 && (j == 0 || j == ny_ - 1);
  }

  /// Distance to the boundary in lattice steps.
  long boundary_steps(std::size_t p) const {
    const long i = column(p), j = row(p);
    long m = std::min(i, nx_ - 1 - i);
    if (ny_ > 1) m = std::min({m, j, ny_ - 1 - j});
    return m;
  }

  double distance_to_boundary(std::size_t p) const { return static_cast<double>(boundary_steps(p)) * h_; }

  /// ceil(dist / eps): the fewest eps-moves that reach the boundary.
  long ball_steps_to_boundary(std::size_t p) const {
    return static_cast<long>(std::ceil(static_cast<double>(boundary_steps(p)) / radius_ - 1e-9));
  }

  const std::vector<Offset>& stencil() const { return stencil_; }

  template <class Fn>
  void for_each_in_ball(std::size_t p, Fn&& fn) const {
    const long i = column(p), j = row(p);
    for (const Offset& o : stencil_) {
      const long a = i + o.dx, b = j + o.dy;
      if (a < 0 || a >= nx_ || b < 0 || b >= ny_) continue;
      fn(index(a, b));
    }
  }

 private:
  double h_;
  double eps_;
  long nx_ = 0;
  long ny_ = 1;
  double radius_ = 0.0;
  std::vector<Offset> stencil_;
};

/// Values at every lattice point; boundary points hold F.
struct GridValues {
  std::vector<double> values;
};

/// Lattice points of the closed ball of radius eps around p, intersected
/// with the closed domain. Boundary points within reach are lattice points,
/// so they are included exactly.
inline std::vector<std::size_t> neighborhood(const GridProblem& problem, std::size_t p) {
  const Lattice lat(problem);
  if (p >= lat.size()) throw InvalidArgument("lattice point out of range");
  std::vector<std::size_t> out;
  lat.for_each_in_ball(p, [&](std::size_t q) { out.push_back(q); });
  std::sort(out.begin(), out.end());
  return out;
}

namespace detail {

struct BallExtremes {
  double inf;
  double sup;
};

inline BallExtremes ball_extremes(const Lattice& lat, const std::vector<double>& u, std::size_t p) {
  BallExtremes e{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  lat.for_each_in_ball(p, [&](std::size_t q) {
    e.inf = std::min(e.inf, u[q]);
    e.sup = std::max(e.sup, u[q]);
  });
  return e;
}

inline double ball_operator(BallExtremes e, double lambda_eps, Variant v) {
  const double mid = 0.5 * (e.sup + e.inf);
  return v == Variant::min ? std::max(e.inf + lambda_eps, mid) : std::min(e.sup - lambda_eps, mid);
}

}  // namespace detail

/// min variant: max{ inf u + lambda eps, (sup u + inf u)/2 };
/// max variant: min{ sup u - lambda eps, (sup u + inf u)/2 }, over the ball.
inline double ball_dpp_apply(const GridProblem& problem, const GridValues& u, std::size_t p) {
  const Lattice lat(problem);
  if (u.values.size() != lat.size()) throw InvalidArgument("grid values do not match lattice");
  if (p >= lat.size()) throw InvalidArgument("lattice point out of range");
  return detail::ball_operator(detail::ball_extremes(lat, u.values, p), problem.lambda * problem.eps,
                               problem.variant);
}

/// Jensen-scheme value at p. Lower (min variant):
///   min{ (u - inf - eps lambda)/eps, (2u - sup - inf)/eps^2 };
/// upper (max variant):
///   max{ (u - sup + eps lambda)/eps, (2u - sup - inf)/eps^2 }.
/// On the first branch eps times the lower scheme equals the DPP residual
/// u - (inf + lambda eps); the second branches differ in scale, 2/eps^2 vs 1.
inline double jensen_residual(const GridProblem& problem, const GridValues& u, std::size_t p, Variant variant) {
  const Lattice lat(problem);
  if (u.values.size() != lat.size()) throw InvalidArgument("grid values do not match lattice");
  const auto e = detail::ball_extremes(lat, u.values, p);
  const double ux = u.values[p], eps = problem.eps, le = problem.lambda * eps;
  const double second = (2.0 * ux - e.sup - e.inf) / (eps * eps);
  if (variant == Variant::min) return std::min((ux - e.inf - le) / eps, second);
  return std::max((ux - e.sup + le) / eps, second);
}

/// Which barrier the iteration starts from.
enum class GridStart {
  barrier,           ///< min: upper barrier, iterates decrease; max: lower barrier, iterates increase
  opposite_barrier,  ///< min: constant -max|F|, iterates increase; max: +max|F|, iterates decrease
};

struct GridSolveOptions {
  double tol = 1e-10;
  long max_iter = 1'000'000;
  GridStart start = GridStart::barrier;
};

struct GridSolveReport {
  GridValues values;
  long iterations = 0;
  double max_change = 0.0;
  double max_residual = 0.0;  ///< max |u - ball_dpp_apply(u)| over interior points
  bool converged = false;
};

/// Boundary trace of F on the lattice.
inline std::vector<double> boundary_trace(const GridProblem& problem, const Lattice& lat) {
  std::vector<double> f(lat.size(), 0.0);
  for (std::size_t p = 0; p < lat.size(); ++p)
    if (lat.is_boundary(p)) f[p] = problem.boundary_payoff(lat.x(p), lat.y(p));
  return f;
}

/// Fixed point of the ball DPP with u = F on the boundary.
///
/// Gauss-Seidel sweeps alternate lexicographic and reverse order. The min
/// variant starts from lambda eps ceil(dist/eps) + max|F|, which is a
/// supersolution of the lattice operator, and the max variant from its
/// negative; the iterates are then monotone and this is checked every sweep.
inline GridSolveReport grid_solve(const GridProblem& problem, const GridSolveOptions& opts = {}) {
  if (!(opts.tol > 0.0)) throw InvalidArgument("tol must be positive");
  const Lattice lat(problem);
  std::vector<double> u = boundary_trace(problem, lat);
  double k = 0.0;
  for (std::size_t p = 0; p < lat.size(); ++p)
    if (lat.is_boundary(p)) k = std::max(k, std::abs(u[p]));

  const double le = problem.lambda * problem.eps;
  const bool min_variant = problem.variant == Variant::min;
  // +1: iterates may only decrease; -1: only increase.
  const double direction = (opts.start == GridStart::barrier) == min_variant ? 1.0 : -1.0;
  for (std::size_t p = 0; p < lat.size(); ++p) {
    if (lat.is_boundary(p)) continue;
    if (opts.start == GridStart::barrier) {
      const double b = le * static_cast<double>(lat.ball_steps_to_boundary(p)) + k;
      u[p] = min_variant ? b : -b;
    } else {
      u[p] = min_variant ? -k : k;
    }
  }

  std::vector<std::size_t> order;
  for (std::size_t p = 0; p < lat.size(); ++p)
    if (!lat.is_boundary(p)) order.push_back(p);

  const double slack = 64.0 * std::numeric_limits<double>::epsilon() *
                       (1.0 + k + le * static_cast<double>(lat.nx() + lat.ny()));
  GridSolveReport report;
  auto sweep = [&](auto begin, auto end) {
    double change = 0.0;
    for (auto it = begin; it != end; ++it) {
      const std::size_t p = *it;
      const double next = detail::ball_operator(detail::ball_extremes(lat, u, p), le, problem.variant);
      if (direction * (next - u[p]) > slack)
        throw InvariantViolation("grid sweep moved against the monotone direction");
      change = std::max(change, std::abs(next - u[p]));
      u[p] = next;
    }
    return change;
  };
  for (long it = 1; it <= opts.max_iter; ++it) {
    const double change = it % 2 == 1 ? sweep(order.begin(), order.end()) : sweep(order.rbegin(), order.rend());
    report.iterations = it;
    report.max_change = change;
    if (change <= opts.tol) {
      report.converged = true;
      break;
    }
  }
  double r = 0.0;
  for (std::size_t p : order)
    r = std::max(r, std::abs(u[p] - detail::ball_operator(detail::ball_extremes(lat, u, p), le, problem.variant)));
  report.max_residual = r;
  report.values.values = std::move(u);
  return report;
}

/// Continuum limit on [0, L] of the min-variant game with boundary values
/// a = u(0), b = u(L): linear when |b - a| >= lambda L, otherwise the tent
/// with slopes +-lambda.
struct Analytic1D {
  double a = 0.0;
  double b = 0.0;
  double lambda = 1.0;
  double length = 1.0;

  bool linear() const { return std::abs(b - a) >= lambda * length; }

  /// Location of the tent peak (for a <= b; mirrored otherwise).
  double peak() const {
    const double lo = std::min(a, b), hi = std::max(a, b);
    const double xs = std::min(length, (hi - lo + lambda * length) / (2.0 * lambda));
    return a <= b ? xs : length - xs;
  }

  double operator()(double x) const {
    if (a > b) return Analytic1D{b, a, lambda, length}(length - x);
    if (linear()) return a + (b - a) * x / length;
    const double xs = (b - a + lambda * length) / (2.0 * lambda);
    return x <= xs ? a + lambda * x : b + lambda * (length - x);
  }
};

inline Analytic1D analytic_1d(double a, double b, double lambda, double length) {
  if (!(length > 0.0)) throw InvalidArgument("length must be positive");
  if (!(lambda > 0.0)) throw InvalidArgument("lambda must be positive");
  return {a, b, lambda, length};
}

/// Geometry of a convergence experiment; eps varies, h = eps / h_ratio.
struct ConvergenceGeometry {
  int dim = 1;
  double lx = 1.0;
  double ly = 1.0;
  double lambda = 1.0;
  Variant variant = Variant::min;
  std::function<double(double, double)> boundary_payoff = [](double, double) { return 0.0; };
};

struct ConvergenceRow {
  double eps = 0.0;
  double h = 0.0;
  double error = 0.0;  ///< 1D: vs analytic_1d; 2D: vs the finest-eps solution
  std::optional<double> order;  ///< log(e_k / e_{k+1}) / log(eps_k / eps_{k+1})
  double distance_error = 0.0;  ///< 2D only: sup |u - (+-) lambda dist|
  long iterations = 0;
  bool converged = false;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  bool all_converged() const {
    return std::all_of(rows.begin(), rows.end(), [](const ConvergenceRow& r) { return r.converged; });
  }
};

/// Solves the geometry for each eps and tabulates sup-norm errors and
/// empirical orders. 1D compares with the analytic limit (negated data and
/// values for the max variant); 2D measures self-convergence against the
/// finest eps and reports the distance-function gap, which is only
/// meaningful for F = 0.
inline ConvergenceTable convergence_study(const ConvergenceGeometry& geo, const std::vector<double>& eps_list,
                                          double h_ratio = 10.0, const GridSolveOptions& opts = {}) {
  if (eps_list.size() < 3) throw InvalidArgument("convergence study needs at least three eps values");
  for (std::size_t i = 1; i < eps_list.size(); ++i)
    if (!(eps_list[i] < eps_list[i - 1])) throw InvalidArgument("eps list must be strictly decreasing");

  ConvergenceTable table;
  std::vector<GridSolveReport> reports;
  std::vector<GridProblem> problems;
  for (double eps : eps_list) {
    GridProblem p{geo.dim, geo.lx, geo.ly, eps / h_ratio, eps, geo.lambda, geo.boundary_payoff, geo.variant};
    reports.push_back(grid_solve(p, opts));
    problems.push_back(p);
    ConvergenceRow row;
    row.eps = eps;
    row.h = p.h;
    row.iterations = reports.back().iterations;
    row.converged = reports.back().converged;
    table.rows.push_back(row);
  }

  const double sign = geo.variant == Variant::min ? 1.0 : -1.0;
  if (geo.dim == 1) {
    // The max variant with data F is the negated min variant with data -F.
    const auto ref = analytic_1d(sign * geo.boundary_payoff(0.0, 0.0), sign * geo.boundary_payoff(geo.lx, 0.0),
                                 geo.lambda, geo.lx);
    for (std::size_t k = 0; k < reports.size(); ++k) {
      const Lattice lat(problems[k]);
      double e = 0.0;
      for (std::size_t p = 0; p < lat.size(); ++p)
        e = std::max(e, std::abs(reports[k].values.values[p] - sign * ref(lat.x(p))));
      table.rows[k].error = e;
    }
  } else {
    const Lattice fine(problems.back());
    const auto& uf = reports.back().values.values;
    for (std::size_t k = 0; k < reports.size(); ++k) {
      const Lattice lat(problems[k]);
      const long ratio = std::lround(lat.h() / fine.h());
      if (std::abs(static_cast<double>(ratio) * fine.h() - lat.h()) > 1e-9 * lat.h())
        throw InvalidArgument("2D self-convergence needs each h to be a multiple of the finest h");
      double e = 0.0, de = 0.0;
      for (std::size_t p = 0; p < lat.size(); ++p) {
        const double v = reports[k].values.values[p];
        const std::size_t q = fine.index(lat.column(p) * ratio, lat.row(p) * ratio);
        e = std::max(e, std::abs(v - uf[q]));
        de = std::max(de, std::abs(v - sign * geo.lambda * lat.distance_to_boundary(p)));
      }
      table.rows[k].error = e;
      table.rows[k].distance_error = de;
    }
  }

  const std::size_t last = geo.dim == 1 ? table.rows.size() : table.rows.size() - 1;
  for (std::size_t k = 1; k < last; ++k) {
    const auto& a = table.rows[k - 1];
    const auto& b = table.rows[k];
    if (a.error > 0.0 && b.error > 0.0) table.rows[k].order = std::log(a.error / b.error) / std::log(a.eps / b.eps);
  }
  return table;
}

}  // namespace tow
