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

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "tow/closed_form.hpp"
#include "tow/continuum.hpp"
#include "tow/dpp.hpp"
#include "tow/game_sim.hpp"
#include "tow/graph.hpp"
#include "tow/verification.hpp"

namespace tow::io {

using Json = nlohmann::ordered_json;

/// Malformed input file. The message names the offending key, or the line
/// and column for syntax errors.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Parses JSON text, reporting syntax errors as "line L, column C".
inline Json parse_json(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(source + ": JSON syntax error at line " + std::to_string(line) + ", column " +
                     std::to_string(col));
  }
}

namespace detail {

inline const Json& require_key(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) throw ParseError(where + ": missing key '" + key + "'");
  return obj.at(key);
}

inline double number_at(const Json& obj, const char* key, const std::string& where) {
  const Json& v = require_key(obj, key, where);
  if (!v.is_number()) throw ParseError(where + ": key '" + key + "' must be a number");
  return v.get<double>();
}

inline long integer_at(const Json& obj, const char* key, const std::string& where) {
  const Json& v = require_key(obj, key, where);
  if (!v.is_number_integer()) throw ParseError(where + ": key '" + key + "' must be an integer");
  return v.get<long>();
}

inline void format_number(std::string& out, double x) {
  if (std::isnan(x)) {
    out += "null";
  } else if (std::isinf(x)) {
    out += x > 0 ? "\"inf\"" : "\"-inf\"";
  } else {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    out += buf;
  }
}

inline void emit(std::string& out, const Json& j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(it.key()).dump() + ": ";
        emit(out, it.value(), indent, depth + 1);
      }
      out += "\n" + close_pad + "}";
      return;
    }
    case Json::value_t::array: {
      // Arrays of scalars stay on one line.
      bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += flat ? "[" : "[\n";
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat ? ", " : ",\n";
        first = false;
        if (!flat) out += pad;
        emit(out, e, indent, depth + 1);
      }
      out += flat ? "]" : "\n" + close_pad + "]";
      return;
    }
    case Json::value_t::number_float:
      format_number(out, j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

}  // namespace detail

/// Serializes with every floating-point number at 17 significant digits.
inline std::string dump17(const Json& j, int indent = 2) {
  std::string out;
  detail::emit(out, j, indent, 0);
  out += "\n";
  return out;
}

inline Json values_json(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(x);
  return a;
}

// ---- graph files ---------------------------------------------------------

/// Graph file: {"epsilon": e, "nodes": [{"id", "terminal", "payoff"?}], "edges": [[a, b]]}.
inline GameSpec graph_from_json(const Json& j, const std::string& where = "graph") {
  if (!j.is_object()) throw ParseError(where + ": top level must be an object");
  const double eps = detail::number_at(j, "epsilon", where);
  const Json& nodes = detail::require_key(j, "nodes", where);
  if (!nodes.is_array()) throw ParseError(where + ": key 'nodes' must be an array");
  const std::size_t n = nodes.size();
  std::vector<bool> seen(n, false);
  std::map<NodeId, double> payoffs;
  for (std::size_t k = 0; k < n; ++k) {
    const std::string at = where + ": nodes[" + std::to_string(k) + "]";
    const Json& node = nodes[k];
    const long id = detail::integer_at(node, "id", at);
    if (id < 0 || static_cast<std::size_t>(id) >= n) throw ParseError(at + ": key 'id' must lie in 0..N-1");
    if (seen[id]) throw ParseError(at + ": duplicate key 'id' " + std::to_string(id));
    seen[id] = true;
    const Json& term = detail::require_key(node, "terminal", at);
    if (!term.is_boolean()) throw ParseError(at + ": key 'terminal' must be a boolean");
    if (term.get<bool>()) {
      payoffs[static_cast<NodeId>(id)] = detail::number_at(node, "payoff", at);
    } else if (node.contains("payoff")) {
      throw ParseError(at + ": key 'payoff' is only allowed on terminal nodes");
    }
  }
  const Json& edges = detail::require_key(j, "edges", where);
  if (!edges.is_array()) throw ParseError(where + ": key 'edges' must be an array");
  std::vector<Edge> list;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const Json& e = edges[k];
    const std::string at = where + ": edges[" + std::to_string(k) + "]";
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
      throw ParseError(at + ": each entry of key 'edges' must be [int, int]");
    const long a = e[0].get<long>(), b = e[1].get<long>();
    if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= n || static_cast<std::size_t>(b) >= n)
      throw ParseError(at + ": key 'edges' references an unknown node id");
    list.emplace_back(static_cast<NodeId>(a), static_cast<NodeId>(b));
  }
  return {GameGraph(n, list, std::move(payoffs)), eps};
}

inline Json graph_to_json(const GameSpec& spec) {
  Json j;
  j["epsilon"] = spec.eps;
  Json nodes = Json::array();
  for (NodeId i = 0; i < spec.graph.size(); ++i) {
    Json node;
    node["id"] = i;
    node["terminal"] = spec.graph.is_terminal(i);
    if (spec.graph.is_terminal(i)) node["payoff"] = spec.graph.payoff(i);
    nodes.push_back(node);
  }
  j["nodes"] = nodes;
  Json edges = Json::array();
  for (auto [a, b] : spec.graph.edges()) edges.push_back(Json::array({a, b}));
  j["edges"] = edges;
  return j;
}

/// Accepts a bare array or any object with a "values" array (e.g. a SolveReport).
inline ValueFunction values_from_json(const Json& j, const std::string& where = "values") {
  const Json& arr = j.is_array() ? j : detail::require_key(j, "values", where);
  if (!arr.is_array()) throw ParseError(where + ": key 'values' must be an array");
  ValueFunction v;
  for (std::size_t k = 0; k < arr.size(); ++k) {
    if (!arr[k].is_number()) throw ParseError(where + ": key 'values' entry " + std::to_string(k) + " is not a number");
    v.push_back(arr[k].get<double>());
  }
  return v;
}

/// Strategy file: {"actions": [{"node", "player1": "let"|"pull", "target"?, "player2"}]}.
inline StrategyPair strategy_from_json(const Json& j, std::size_t node_count, const std::string& where = "strategy") {
  const Json& actions = detail::require_key(j, "actions", where);
  if (!actions.is_array()) throw ParseError(where + ": key 'actions' must be an array");
  StrategyPair pair{std::vector<PlayerOneAction>(node_count), std::vector<NodeId>(node_count, 0)};
  for (std::size_t k = 0; k < actions.size(); ++k) {
    const std::string at = where + ": actions[" + std::to_string(k) + "]";
    const Json& a = actions[k];
    const long node = detail::integer_at(a, "node", at);
    if (node < 0 || static_cast<std::size_t>(node) >= node_count) throw ParseError(at + ": key 'node' out of range");
    const Json& p1 = detail::require_key(a, "player1", at);
    if (!p1.is_string()) throw ParseError(at + ": key 'player1' must be \"let\" or \"pull\"");
    const std::string kind = p1.get<std::string>();
    if (kind == "let") {
      pair.player1[node] = PlayerOneAction::let_opponent();
    } else if (kind == "pull") {
      pair.player1[node] = PlayerOneAction::pull(static_cast<NodeId>(detail::integer_at(a, "target", at)));
    } else {
      throw ParseError(at + ": key 'player1' must be \"let\" or \"pull\"");
    }
    pair.player2[node] = static_cast<NodeId>(detail::integer_at(a, "player2", at));
  }
  return pair;
}

inline Json strategy_to_json(const GameSpec& spec, const StrategyPair& pair) {
  Json actions = Json::array();
  for (NodeId i : spec.graph.interior()) {
    Json a;
    a["node"] = i;
    if (pair.player1[i].lets()) {
      a["player1"] = "let";
    } else {
      a["player1"] = "pull";
      a["target"] = pair.player1[i].target;
    }
    a["player2"] = pair.player2[i];
    actions.push_back(a);
  }
  Json j;
  j["actions"] = actions;
  return j;
}

// ---- result serialization -----------------------------------------------

inline Json to_json(const SolveReport& r) {
  Json j;
  j["values"] = values_json(r.values);
  j["iterations"] = r.iterations;
  j["max_residual"] = r.max_residual;
  j["converged"] = r.converged;
  return j;
}

inline Json to_json(const Classification& c) {
  Json j;
  j["kind"] = std::string(to_string(c.kind));
  j["residuals"] = values_json(c.residuals);
  return j;
}

inline Json to_json(const SegmentSolution& s) {
  Json j;
  j["case"] = std::string(1, case_letter(s.case_label));
  j["q"] = s.q;
  j["k"] = s.k ? Json(*s.k) : Json(nullptr);
  j["family_j_range"] = s.family_j_range ? Json::array({s.family_j_range->lo, s.family_j_range->hi}) : Json(nullptr);
  j["mirrored"] = s.mirrored;
  j["values"] = values_json(s.values);
  return j;
}

inline Json to_json(const StarSolution& s) {
  Json j;
  j["values"] = values_json(s.values);
  j["terminal_pair"] = Json::array({s.terminal_pair.first, s.terminal_pair.second});
  j["hub_residual"] = s.hub_residual;
  j["trials"] = s.trials;
  return j;
}

inline Json to_json(const Estimate& e) {
  Json j;
  j["mean"] = e.mean;
  j["std_error"] = e.std_error;
  j["episodes"] = e.episodes;
  j["truncated_fraction"] = e.truncated_fraction;
  if (e.truncated_fraction > 0.0)
    j["warning"] = "some episodes did not terminate; the game value convention assigns -inf/+inf to such strategies";
  return j;
}

inline Json to_json(const BruteForceResult& b, double tol) {
  Json j;
  j["maximin"] = values_json(b.maximin);
  j["minimax"] = values_json(b.minimax);
  j["has_value"] = b.has_value(tol);
  j["pairs_evaluated"] = b.pairs_evaluated;
  return j;
}

inline Json to_json(const ConvergenceTable& t) {
  Json rows = Json::array();
  for (const auto& r : t.rows) {
    Json row;
    row["eps"] = r.eps;
    row["h"] = r.h;
    row["error"] = r.error;
    row["order"] = r.order ? Json(*r.order) : Json(nullptr);
    row["distance_error"] = r.distance_error;
    row["iterations"] = r.iterations;
    row["converged"] = r.converged;
    rows.push_back(row);
  }
  Json j;
  j["rows"] = rows;
  j["all_converged"] = t.all_converged();
  return j;
}

}  // namespace tow::io
