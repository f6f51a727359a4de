// Copyright 2026 The EAS Search Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// TSP and CVRP environments.
//
// Node numbering: a TSP instance has nodes 0..n-1. A CVRP instance has n
// customers 1..n and the depot at node 0, so its arrays hold n+1 entries and
// its action space is {depot} + customers. Every CVRP route starts and ends
// at the depot; the final return edge is always counted.

#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "eas/random.hpp"
#include "eas/tensor.hpp"

namespace eas {

enum class ProblemKind : std::uint8_t { kTsp = 0, kCvrp = 1 };

inline const char* kind_name(ProblemKind k) { return k == ProblemKind::kTsp ? "tsp" : "cvrp"; }

inline ProblemKind parse_kind(const std::string& s) {
  if (s == "tsp" || s == "TSP") return ProblemKind::kTsp;
  if (s == "cvrp" || s == "CVRP") return ProblemKind::kCvrp;
  throw Error("unknown problem kind '" + s + "'");
}

struct Point {
  double x = 0;
  double y = 0;
  friend bool operator==(const Point&, const Point&) = default;
};

inline double distance(const Point& a, const Point& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

struct Instance {
  ProblemKind kind = ProblemKind::kTsp;
  int n = 0;  // cities (TSP) or customers (CVRP)
  std::vector<Point> coords;
  std::vector<int> demands;  // CVRP only; demands[0] == 0
  int capacity = 0;          // CVRP only
  std::uint64_t seed = 0;

  int node_count() const { return kind == ProblemKind::kTsp ? n : n + 1; }
  double dist(int a, int b) const { return distance(coords[static_cast<std::size_t>(a)], coords[static_cast<std::size_t>(b)]); }

  friend bool operator==(const Instance&, const Instance&) = default;
};

inline int default_capacity(int customers) {
  if (customers <= 20) return 30;
  if (customers <= 50) return 40;
  return 50;
}

inline void validate(const Instance& inst) {
  const auto nodes = static_cast<std::size_t>(inst.node_count());
  if (inst.kind == ProblemKind::kTsp && inst.n < 3) throw Error("tsp instance needs n >= 3");
  if (inst.kind == ProblemKind::kCvrp && inst.n < 2) throw Error("cvrp instance needs n >= 2 customers");
  if (inst.coords.size() != nodes)
    throw Error("expected " + std::to_string(nodes) + " coordinates, got " + std::to_string(inst.coords.size()));
  for (const Point& p : inst.coords)
    if (!(p.x >= 0 && p.x <= 1 && p.y >= 0 && p.y <= 1)) throw Error("coordinate outside the unit square");
  if (inst.kind == ProblemKind::kCvrp) {
    if (inst.capacity <= 0) throw Error("cvrp capacity must be positive");
    if (inst.demands.size() != nodes) throw Error("cvrp demands must have n+1 entries");
    if (inst.demands[0] != 0) throw Error("depot demand must be 0");
    for (std::size_t i = 1; i < nodes; ++i)
      if (inst.demands[i] < 0 || inst.demands[i] > inst.capacity)
        throw Error("demand of customer " + std::to_string(i) + " outside [0, capacity]");
  }
}

/// Coordinates i.i.d. uniform on the unit square; CVRP demands uniform on
/// 1..9 with the capacity given by default_capacity(). Pure in (kind, n, seed).
inline Instance generate_instance(ProblemKind kind, int n, std::uint64_t seed) {
  if (kind == ProblemKind::kTsp && n < 3) throw Error("tsp instance needs n >= 3, got " + std::to_string(n));
  if (kind == ProblemKind::kCvrp && n < 2) throw Error("cvrp instance needs n >= 2 customers, got " + std::to_string(n));
  Rng rng(seed);
  Instance inst;
  inst.kind = kind;
  inst.n = n;
  inst.seed = seed;
  const int nodes = inst.node_count();
  inst.coords.resize(static_cast<std::size_t>(nodes));
  for (Point& p : inst.coords) {
    p.x = uniform01(rng);
    p.y = uniform01(rng);
  }
  if (kind == ProblemKind::kCvrp) {
    inst.capacity = default_capacity(n);
    inst.demands.assign(static_cast<std::size_t>(nodes), 0);
    for (int i = 1; i < nodes; ++i) inst.demands[static_cast<std::size_t>(i)] = uniform_int(rng, 1, 9);
  }
  return inst;
}

/// Applies the k-th symmetry of the unit square (0 = identity).
inline Point transform_point(const Point& p, int k) {
  switch (k) {
    case 0: return {p.x, p.y};
    case 1: return {p.y, p.x};
    case 2: return {1 - p.x, p.y};
    case 3: return {1 - p.y, p.x};
    case 4: return {p.x, 1 - p.y};
    case 5: return {p.y, 1 - p.x};
    case 6: return {1 - p.x, 1 - p.y};
    case 7: return {1 - p.y, 1 - p.x};
    default: throw Error("augmentation index " + std::to_string(k) + " outside 0..7");
  }
}

inline int inverse_symmetry(int k) {
  static constexpr int kInverse[8] = {0, 1, 2, 5, 4, 3, 6, 7};
  if (k < 0 || k > 7) throw Error("augmentation index " + std::to_string(k) + " outside 0..7");
  return kInverse[k];
}

inline Instance augment(const Instance& inst, int k) {
  Instance out = inst;
  for (Point& p : out.coords) p = transform_point(p, k);
  return out;
}

struct RolloutState {
  int step = 0;
  int current = -1;  // -1 before the first TSP action
  int start = -1;
  std::vector<std::uint8_t> visited;
  int visited_count = 0;  // distinct cities (TSP) or customers (CVRP)
  int remaining = 0;      // CVRP load left
  std::vector<int> actions;
};

inline RolloutState initial_state(const Instance& inst) {
  RolloutState s;
  s.visited.assign(static_cast<std::size_t>(inst.node_count()), 0);
  if (inst.kind == ProblemKind::kCvrp) {
    s.current = 0;
    s.remaining = inst.capacity;
  }
  return s;
}

inline bool is_terminal(const Instance& inst, const RolloutState& s) { return s.visited_count == inst.n; }

/// Writes the feasibility mask over actions into `out` (node_count entries).
inline void feasible_mask_into(const Instance& inst, const RolloutState& s, std::span<std::uint8_t> out) {
  const int nodes = inst.node_count();
  if (inst.kind == ProblemKind::kTsp) {
    for (int i = 0; i < nodes; ++i) out[static_cast<std::size_t>(i)] = !s.visited[static_cast<std::size_t>(i)];
    return;
  }
  out[0] = s.current != 0;
  for (int i = 1; i < nodes; ++i) {
    const auto u = static_cast<std::size_t>(i);
    out[u] = !s.visited[u] && inst.demands[u] <= s.remaining;
  }
}

inline std::vector<std::uint8_t> feasible_mask(const Instance& inst, const RolloutState& s) {
  if (is_terminal(inst, s)) throw Error("feasible_mask: state is terminal");
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(inst.node_count()));
  feasible_mask_into(inst, s, mask);
  return mask;
}

/// Names the violated constraint if `action` is infeasible, empty otherwise.
inline std::string infeasibility(const Instance& inst, const RolloutState& s, int action) {
  if (is_terminal(inst, s)) return "state is terminal";
  if (action < 0 || action >= inst.node_count()) return "action " + std::to_string(action) + " out of range";
  const auto a = static_cast<std::size_t>(action);
  if (inst.kind == ProblemKind::kCvrp && action == 0) {
    return s.current == 0 ? "depot visit at the first step or directly after a depot visit" : "";
  }
  if (s.visited[a]) return "node " + std::to_string(action) + " already visited";
  if (inst.kind == ProblemKind::kCvrp && inst.demands[a] > s.remaining)
    return "demand of customer " + std::to_string(action) + " exceeds remaining capacity";
  return "";
}

/// Unchecked transition for callers that only pick masked-feasible actions.
inline void advance(const Instance& inst, RolloutState& s, int action) {
  const auto a = static_cast<std::size_t>(action);
  if (inst.kind == ProblemKind::kTsp) {
    if (s.step == 0) s.start = action;
    s.visited[a] = 1;
    ++s.visited_count;
  } else if (action == 0) {
    s.remaining = inst.capacity;
  } else {
    if (s.step == 0) s.start = action;
    s.visited[a] = 1;
    ++s.visited_count;
    s.remaining -= inst.demands[a];
  }
  s.current = action;
  s.actions.push_back(action);
  ++s.step;
}

inline RolloutState apply_action(const Instance& inst, const RolloutState& s, int action) {
  if (std::string why = infeasibility(inst, s, action); !why.empty()) throw Error("infeasible action: " + why);
  RolloutState next = s;
  advance(inst, next, action);
  return next;
}

struct Solution {
  std::vector<int> actions;
  double cost = 0;
  std::vector<Real> probs;  // per-step probability of the chosen action
};

/// Objective value of a complete action sequence; throws naming the violated
/// constraint if the sequence is infeasible or incomplete.
inline double solution_cost(const Instance& inst, std::span<const int> actions) {
  RolloutState s = initial_state(inst);
  for (std::size_t t = 0; t < actions.size(); ++t) {
    if (std::string why = infeasibility(inst, s, actions[t]); !why.empty())
      throw Error("infeasible solution at step " + std::to_string(t) + ": " + why);
    advance(inst, s, actions[t]);
  }
  if (!is_terminal(inst, s))
    throw Error("infeasible solution: " + std::to_string(inst.n - s.visited_count) + " nodes never visited");
  double cost = 0;
  if (inst.kind == ProblemKind::kTsp) {
    for (std::size_t t = 0; t + 1 < actions.size(); ++t) cost += inst.dist(actions[t], actions[t + 1]);
    cost += inst.dist(actions.back(), actions.front());
  } else {
    int prev = 0;
    for (int a : actions) {
      cost += inst.dist(prev, a);
      prev = a;
    }
    cost += inst.dist(prev, 0);
  }
  return cost;
}

}  // namespace eas
