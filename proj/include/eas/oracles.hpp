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

// Exact and heuristic reference solvers used to score learned policies.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "eas/problems.hpp"

namespace eas {

inline constexpr int kMaxExactTsp = 16;
inline constexpr int kMaxExactCvrp = 8;

inline bool exact_supported(const Instance& inst) {
  return inst.kind == ProblemKind::kTsp ? inst.n <= kMaxExactTsp : inst.n <= kMaxExactCvrp;
}

/// Held-Karp over (visited subset, endpoint) with node 0 fixed as the start.
inline double held_karp(const Instance& inst) {
  const int n = inst.n;
  if (inst.kind != ProblemKind::kTsp) throw Error("held_karp: tsp instance required");
  if (n > kMaxExactTsp) throw Error("held_karp: n = " + std::to_string(n) + " above limit " + std::to_string(kMaxExactTsp));
  const int m = n - 1;  // nodes 1..n-1 are encoded as bits 0..m-1
  const std::size_t subsets = std::size_t{1} << m;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dp(subsets * static_cast<std::size_t>(m), kInf);
  auto at = [&](std::size_t mask, int j) -> double& { return dp[mask * static_cast<std::size_t>(m) + static_cast<std::size_t>(j)]; };
  for (int j = 0; j < m; ++j) at(std::size_t{1} << j, j) = inst.dist(0, j + 1);
  for (std::size_t mask = 1; mask < subsets; ++mask) {
    for (int j = 0; j < m; ++j) {
      if (!(mask >> j & 1U)) continue;
      const double here = at(mask, j);
      if (here == kInf) continue;
      for (int k = 0; k < m; ++k) {
        if (mask >> k & 1U) continue;
        double& next = at(mask | (std::size_t{1} << k), k);
        next = std::min(next, here + inst.dist(j + 1, k + 1));
      }
    }
  }
  double best = kInf;
  for (int j = 0; j < m; ++j) best = std::min(best, at(subsets - 1, j) + inst.dist(j + 1, 0));
  return best;
}

/// Optimal depot-anchored partition of a fixed customer order into
/// capacity-feasible consecutive routes. Returns the cost and fills `cuts`
/// with the route start positions when non-null.
inline double split_routes(const Instance& inst, std::span<const int> order, std::vector<int>* cuts = nullptr) {
  const std::size_t k = order.size();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> best(k + 1, kInf);
  std::vector<std::size_t> from(k + 1, 0);
  best[0] = 0;
  for (std::size_t i = 0; i < k; ++i) {
    if (best[i] == kInf) continue;
    int load = 0;
    double length = 0;
    for (std::size_t j = i; j < k; ++j) {
      load += inst.demands[static_cast<std::size_t>(order[j])];
      if (load > inst.capacity) break;
      length += j == i ? inst.dist(0, order[j]) : inst.dist(order[j - 1], order[j]);
      const double total = best[i] + length + inst.dist(order[j], 0);
      if (total < best[j + 1]) {
        best[j + 1] = total;
        from[j + 1] = i;
      }
    }
  }
  if (cuts) {
    cuts->clear();
    for (std::size_t j = k; j > 0; j = from[j]) cuts->push_back(static_cast<int>(from[j]));
    std::reverse(cuts->begin(), cuts->end());
  }
  return best[k];
}

/// Every CVRP solution is some customer order cut into routes, so the
/// minimum over all orders of the optimal split is the optimum.
inline double cvrp_exact(const Instance& inst) {
  if (inst.kind != ProblemKind::kCvrp) throw Error("cvrp_exact: cvrp instance required");
  if (inst.n > kMaxExactCvrp)
    throw Error("cvrp_exact: n = " + std::to_string(inst.n) + " customers above limit " + std::to_string(kMaxExactCvrp));
  std::vector<int> order(static_cast<std::size_t>(inst.n));
  std::iota(order.begin(), order.end(), 1);
  double best = std::numeric_limits<double>::infinity();
  do {
    best = std::min(best, split_routes(inst, order));
  } while (std::next_permutation(order.begin(), order.end()));
  return best;
}

inline double exact_optimum(const Instance& inst) {
  return inst.kind == ProblemKind::kTsp ? held_karp(inst) : cvrp_exact(inst);
}

/// Closed-cycle 2-opt with position 0 held fixed; first improvement until no
/// exchange shortens the cycle by more than `eps`.
inline void two_opt(const Instance& inst, std::vector<int>& cycle, double eps = 1e-12) {
  const std::size_t m = cycle.size();
  if (m < 4) return;
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t i = 0; i + 2 < m; ++i) {
      for (std::size_t j = i + 2; j < m; ++j) {
        const int a = cycle[i];
        const int b = cycle[i + 1];
        const int c = cycle[j];
        const int d = cycle[(j + 1) % m];
        if (d == a) continue;
        const double delta = inst.dist(a, c) + inst.dist(b, d) - inst.dist(a, b) - inst.dist(c, d);
        if (delta < -eps) {
          std::reverse(cycle.begin() + static_cast<std::ptrdiff_t>(i + 1), cycle.begin() + static_cast<std::ptrdiff_t>(j + 1));
          improved = true;
        }
      }
    }
  }
}

/// Nearest neighbour from node 0 plus 2-opt (TSP); angular sweep around the
/// depot plus per-route 2-opt (CVRP). Deterministic.
inline Solution reference_solution(const Instance& inst) {
  Solution sol;
  if (inst.kind == ProblemKind::kTsp) {
    std::vector<int> tour{0};
    std::vector<std::uint8_t> used(static_cast<std::size_t>(inst.n), 0);
    used[0] = 1;
    for (int step = 1; step < inst.n; ++step) {
      int best = -1;
      for (int j = 0; j < inst.n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        if (best < 0 || inst.dist(tour.back(), j) < inst.dist(tour.back(), best)) best = j;
      }
      used[static_cast<std::size_t>(best)] = 1;
      tour.push_back(best);
    }
    two_opt(inst, tour);
    sol.actions = tour;
  } else {
    std::vector<int> order(static_cast<std::size_t>(inst.n));
    std::iota(order.begin(), order.end(), 1);
    const Point depot = inst.coords[0];
    auto angle = [&](int c) {
      const Point& p = inst.coords[static_cast<std::size_t>(c)];
      return std::atan2(p.y - depot.y, p.x - depot.x);
    };
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return angle(a) < angle(b); });
    std::vector<std::vector<int>> routes;
    int load = inst.capacity + 1;
    for (int c : order) {
      const int demand = inst.demands[static_cast<std::size_t>(c)];
      if (load + demand > inst.capacity) {
        routes.push_back({0});
        load = 0;
      }
      routes.back().push_back(c);
      load += demand;
    }
    for (auto& route : routes) {
      two_opt(inst, route);
      if (!sol.actions.empty()) sol.actions.push_back(0);
      sol.actions.insert(sol.actions.end(), route.begin() + 1, route.end());
    }
  }
  sol.cost = solution_cost(inst, sol.actions);
  return sol;
}

inline double reference_heuristic(const Instance& inst) { return reference_solution(inst).cost; }

}  // namespace eas
