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

// tow: batch front end for the graph solvers, the game simulator and the
// lattice solver.
//
// Exit codes: 0 success, 2 parse or usage error, 3 non-convergence (the
// report is still written), 4 invariant violation.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tow/io.hpp"
#include "tow/tow.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kNoConvergence = 3;
constexpr int kInvariant = 4;

// Default simulation seed, so runs are reproducible without --seed.
constexpr std::uint64_t kDefaultSeed = 20260101;

using tow::io::Json;

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw tow::io::ParseError(path + ": cannot open for writing");
  out << text;
}

tow::GameSpec load_graph(const std::string& path) {
  const auto j = tow::io::parse_json(tow::io::read_file(path), path);
  tow::GameSpec spec = tow::io::graph_from_json(j, path);
  tow::require_valid(spec);
  return spec;
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Boundary data for the lattice commands: per-side constants, or the
// nearest sample of a CSV of (x, y, value) rows.
struct BoundarySpec {
  double left = 0.0, right = 0.0, bottom = 0.0, top = 0.0;
  std::string csv;
};

struct BoundarySample {
  double x, y, value;
};

std::vector<BoundarySample> read_boundary_csv(const std::string& path) {
  std::istringstream in(tow::io::read_file(path));
  std::vector<BoundarySample> out;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    for (char& c : line)
      if (c == ',') c = ' ';
    std::istringstream row(line);
    BoundarySample s{};
    if (!(row >> s.x >> s.y >> s.value)) {
      if (out.empty() && lineno == 1) continue;  // header
      throw tow::io::ParseError(path + ": line " + std::to_string(lineno) + ", column 1: expected x,y,value");
    }
    out.push_back(s);
  }
  if (out.empty()) throw tow::io::ParseError(path + ": no boundary samples");
  return out;
}

std::function<double(double, double)> make_boundary(const BoundarySpec& b, int dim, double lx, double ly) {
  if (!b.csv.empty()) {
    auto samples = read_boundary_csv(b.csv);
    return [samples](double x, double y) {
      double best = std::numeric_limits<double>::infinity(), v = 0.0;
      for (const auto& s : samples) {
        const double d = (s.x - x) * (s.x - x) + (s.y - y) * (s.y - y);
        if (d < best) {
          best = d;
          v = s.value;
        }
      }
      return v;
    };
  }
  const double tol = 1e-12 * (1.0 + lx + ly);
  // Corners take the bottom/top value.
  return [b, dim, lx, ly, tol](double x, double y) {
    if (dim == 2) {
      if (y <= tol) return b.bottom;
      if (y >= ly - tol) return b.top;
    }
    return x <= lx / 2 ? b.left : b.right;
  };
}

tow::Variant parse_variant(const std::string& s) { return s == "max" ? tow::Variant::max : tow::Variant::min; }

void add_boundary_flags(CLI::App* cmd, BoundarySpec& b) {
  cmd->add_option("--left", b.left, "Constant payoff on x = 0")->capture_default_str();
  cmd->add_option("--right", b.right, "Constant payoff on x = lx")->capture_default_str();
  cmd->add_option("--bottom", b.bottom, "Constant payoff on y = 0 (2D; takes the corners)")->capture_default_str();
  cmd->add_option("--top", b.top, "Constant payoff on y = ly (2D; takes the corners)")->capture_default_str();
  cmd->add_option("--boundary-csv", b.csv, "CSV of x,y,value boundary samples; nearest sample is used")
      ->check(CLI::ExistingFile);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tow: solver, verifier and simulator for tug-of-war games with running payments"};
  app.require_subcommand(1);
  app.footer("Exit codes: 0 ok, 2 parse/usage error, 3 non-convergence (report still written), 4 invariant violation.");

  std::string output = "-";
  auto add_output = [&](CLI::App* cmd) {
    cmd->add_option("-o,--output", output, "Output JSON path ('-' for stdout)")->capture_default_str();
  };

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "Solve the DPP on a graph by monotone Gauss-Seidel iteration");
  std::string graph_path;
  tow::SolveOptions solve_opts;
  solve_cmd->add_option("-g,--graph", graph_path, "Graph JSON file")->required();
  solve_cmd->add_option("--tol", solve_opts.tol, "Stop when sweep change and residual are below this")
      ->capture_default_str();
  solve_cmd->add_option("--max-iter", solve_opts.max_iter, "Sweep limit")->capture_default_str();
  add_output(solve_cmd);

  // closed-form
  auto* cf_cmd = app.add_subcommand("closed-form", "Closed-form value of a segment or star game");
  std::optional<long> cf_n;
  double cf_f0 = 0.0, cf_f1 = 0.0, cf_eps = 1.0;
  std::vector<long> cf_arms;
  std::vector<double> cf_payoffs;
  std::optional<long> cf_family_j;
  std::string cf_strategy_out;
  auto* opt_n = cf_cmd->add_option("--n", cf_n, "Segment interior node count");
  cf_cmd->add_option("--f0", cf_f0, "Payoff at x_0")->capture_default_str();
  cf_cmd->add_option("--f1", cf_f1, "Payoff at x_{n+1}")->capture_default_str();
  cf_cmd->add_option("--eps", cf_eps, "Step cost eps")->required();
  auto* opt_arms = cf_cmd->add_option("--arms", cf_arms, "Star arm lengths")->delimiter(',')->excludes(opt_n);
  cf_cmd->add_option("--payoffs", cf_payoffs, "Star terminal payoffs, one per arm")->delimiter(',')->needs(opt_arms);
  cf_cmd->add_option("--family-j", cf_family_j, "Family member for the strategy file at boundary Q")->needs(opt_n);
  cf_cmd->add_option("--strategy-out", cf_strategy_out, "Write the segment strategy pair to this file")
      ->needs(opt_n);
  add_output(cf_cmd);

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "Classify candidate values as sub/supersolution");
  std::string values_path;
  double verify_tol = 1e-9;
  verify_cmd->add_option("-g,--graph", graph_path, "Graph JSON file")->required();
  verify_cmd->add_option("--values", values_path, "Values JSON (array or object with \"values\")")->required();
  verify_cmd->add_option("--tol", verify_tol, "Classification tolerance")->capture_default_str();
  add_output(verify_cmd);

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo estimate of a stationary strategy pair");
  std::string strategy_path;
  long start = 1, episodes = 10000, max_steps = 100000;
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 1;
  sim_cmd->add_option("-g,--graph", graph_path, "Graph JSON file")->required();
  sim_cmd->add_option("--strategy", strategy_path, "Strategy JSON file")->required();
  sim_cmd->add_option("--start", start, "Start node")->capture_default_str();
  sim_cmd->add_option("--episodes", episodes, "Episode count")->capture_default_str();
  sim_cmd->add_option("--seed", seed, "64-bit seed")->capture_default_str();
  sim_cmd->add_option("--max-steps", max_steps, "Truncate episodes after this many moves")->capture_default_str();
  sim_cmd->add_option("--threads", threads, "Worker threads; output does not depend on this")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  add_output(sim_cmd);

  // brute-force
  auto* bf_cmd = app.add_subcommand("brute-force", "Maximin and minimax over all stationary strategy pairs");
  std::size_t max_interior = 6;
  double bf_tol = 1e-9;
  bf_cmd->add_option("-g,--graph", graph_path, "Graph JSON file")->required();
  bf_cmd->add_option("--max-interior", max_interior, "Refuse graphs with more interior nodes")->capture_default_str();
  bf_cmd->add_option("--tol", bf_tol, "Tolerance for has_value")->capture_default_str();
  add_output(bf_cmd);

  // grid
  auto* grid_cmd = app.add_subcommand("grid", "Solve the eps-ball lattice game on an interval or rectangle");
  tow::GridProblem gp;
  std::optional<double> grid_h;
  std::string variant = "min", csv_out;
  BoundarySpec boundary;
  tow::GridSolveOptions grid_opts;
  grid_cmd->set_help_flag("--help", "Print this help message and exit");
  grid_cmd->add_option("--dim", gp.dim, "1 or 2")->capture_default_str()->check(CLI::IsMember({1, 2}));
  grid_cmd->add_option("--lx", gp.lx, "Domain length in x")->capture_default_str();
  grid_cmd->add_option("--ly", gp.ly, "Domain length in y (2D)")->capture_default_str();
  grid_cmd->add_option("--eps", gp.eps, "Ball radius")->required();
  grid_cmd->add_option("--h", grid_h, "Lattice spacing (default eps/10)");
  grid_cmd->add_option("--lambda", gp.lambda, "Payment rate")->capture_default_str();
  grid_cmd->add_option("--variant", variant, "min or max")->capture_default_str()->check(CLI::IsMember({"min", "max"}));
  grid_cmd->add_option("--tol", grid_opts.tol, "Sweep change tolerance")->capture_default_str();
  grid_cmd->add_option("--max-iter", grid_opts.max_iter, "Sweep limit")->capture_default_str();
  grid_cmd->add_option("--csv", csv_out, "Output CSV of coordinates and values")->required();
  add_boundary_flags(grid_cmd, boundary);
  add_output(grid_cmd);

  // convergence
  auto* conv_cmd = app.add_subcommand("convergence", "Error table of the lattice game over a decreasing eps list");
  tow::ConvergenceGeometry geo;
  std::vector<double> eps_list{0.2, 0.1, 0.05, 0.025};
  double h_ratio = 10.0;
  conv_cmd->add_option("--dim", geo.dim, "1 or 2")->capture_default_str()->check(CLI::IsMember({1, 2}));
  conv_cmd->add_option("--lx", geo.lx, "Domain length in x")->capture_default_str();
  conv_cmd->add_option("--ly", geo.ly, "Domain length in y (2D)")->capture_default_str();
  conv_cmd->add_option("--lambda", geo.lambda, "Payment rate")->capture_default_str();
  conv_cmd->add_option("--variant", variant, "min or max")->capture_default_str()->check(CLI::IsMember({"min", "max"}));
  conv_cmd->add_option("--eps-list", eps_list, "Decreasing eps values")->delimiter(',')->capture_default_str();
  conv_cmd->add_option("--h-ratio", h_ratio, "h = eps / h-ratio")->capture_default_str();
  conv_cmd->add_option("--tol", grid_opts.tol, "Sweep change tolerance")->capture_default_str();
  add_boundary_flags(conv_cmd, boundary);
  add_output(conv_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (solve_cmd->parsed()) {
      const auto spec = load_graph(graph_path);
      const auto report = tow::solve(spec, solve_opts);
      write_text(output, tow::io::dump17(tow::io::to_json(report)));
      return report.converged ? kOk : kNoConvergence;
    }

    if (cf_cmd->parsed()) {
      if (cf_n) {
        const auto spec = tow::build_segment(*cf_n, cf_f0, cf_f1, cf_eps);
        const auto sol = tow::segment_value(spec);
        write_text(output, tow::io::dump17(tow::io::to_json(sol)));
        if (!cf_strategy_out.empty())
          write_text(cf_strategy_out,
                     tow::io::dump17(tow::io::strategy_to_json(spec, tow::segment_strategies(sol, cf_family_j))));
        return kOk;
      }
      if (cf_arms.empty()) throw tow::InvalidArgument("closed-form needs --n or --arms");
      const auto spec = tow::build_star(cf_arms, cf_payoffs, cf_eps);
      write_text(output, tow::io::dump17(tow::io::to_json(tow::star_value(spec))));
      return kOk;
    }

    if (verify_cmd->parsed()) {
      const auto spec = load_graph(graph_path);
      const auto values =
          tow::io::values_from_json(tow::io::parse_json(tow::io::read_file(values_path), values_path), values_path);
      write_text(output, tow::io::dump17(tow::io::to_json(tow::classify(spec, values, verify_tol))));
      return kOk;
    }

    if (sim_cmd->parsed()) {
      const auto spec = load_graph(graph_path);
      const auto pair = tow::io::strategy_from_json(
          tow::io::parse_json(tow::io::read_file(strategy_path), strategy_path), spec.graph.size(), strategy_path);
      if (start < 0) throw tow::InvalidArgument("start node must be non-negative");
      try {
        const auto est =
            tow::estimate(spec, pair, static_cast<tow::NodeId>(start), episodes, seed, max_steps, threads);
        Json j = tow::io::to_json(est);
        j["seed"] = seed;
        write_text(output, tow::io::dump17(j));
        return kOk;
      } catch (const tow::EstimateUndefined& e) {
        Json j;
        j["mean"] = nullptr;
        j["std_error"] = nullptr;
        j["episodes"] = episodes;
        j["truncated_fraction"] = e.truncated_fraction();
        j["seed"] = seed;
        j["warning"] = e.what();
        write_text(output, tow::io::dump17(j));
        return kNoConvergence;
      }
    }

    if (bf_cmd->parsed()) {
      const auto spec = load_graph(graph_path);
      write_text(output, tow::io::dump17(tow::io::to_json(tow::brute_force_value(spec, max_interior), bf_tol)));
      return kOk;
    }

    if (grid_cmd->parsed()) {
      gp.h = grid_h.value_or(gp.eps / 10.0);
      gp.variant = parse_variant(variant);
      gp.boundary_payoff = make_boundary(boundary, gp.dim, gp.lx, gp.ly);
      const auto report = tow::grid_solve(gp, grid_opts);
      const tow::Lattice lat(gp);

      std::string csv = gp.dim == 1 ? "x,value\n" : "x,y,value\n";
      for (std::size_t p = 0; p < lat.size(); ++p) {
        csv += fmt17(lat.x(p));
        if (gp.dim == 2) csv += "," + fmt17(lat.y(p));
        csv += "," + fmt17(report.values.values[p]) + "\n";
      }
      write_text(csv_out, csv);

      Json j;
      j["dim"] = gp.dim;
      j["eps"] = gp.eps;
      j["h"] = gp.h;
      j["lambda"] = gp.lambda;
      j["variant"] = variant;
      j["points"] = lat.size();
      j["iterations"] = report.iterations;
      j["max_change"] = report.max_change;
      j["max_residual"] = report.max_residual;
      j["converged"] = report.converged;
      if (gp.dim == 1 && boundary.csv.empty()) {
        const double sign = gp.variant == tow::Variant::min ? 1.0 : -1.0;
        const auto ref = tow::analytic_1d(sign * boundary.left, sign * boundary.right, gp.lambda, gp.lx);
        double err = 0.0;
        for (std::size_t p = 0; p < lat.size(); ++p)
          err = std::max(err, std::abs(report.values.values[p] - sign * ref(lat.x(p))));
        j["error_vs_reference"] = err;
      }
      write_text(output, tow::io::dump17(j));
      return report.converged ? kOk : kNoConvergence;
    }

    if (conv_cmd->parsed()) {
      geo.variant = parse_variant(variant);
      geo.boundary_payoff = make_boundary(boundary, geo.dim, geo.lx, geo.ly);
      const auto table = tow::convergence_study(geo, eps_list, h_ratio, grid_opts);
      write_text(output, tow::io::dump17(tow::io::to_json(table)));
      return table.all_converged() ? kOk : kNoConvergence;
    }
  } catch (const tow::io::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const tow::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const tow::InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return kInvariant;
  } catch (const tow::AlgorithmFailure& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return kInvariant;
  } catch (const tow::PreconditionViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kUsage;
}
