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

// Directed-edge score table for tabular search. Entry (i, j) scales the
// probability of moving from node i to node j.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "eas/tensor.hpp"

namespace eas {

class QTable {
 public:
  QTable() = default;
  explicit QTable(int nodes)
      : nodes_(nodes), values_(static_cast<std::size_t>(nodes) * static_cast<std::size_t>(nodes), Real(1)) {}

  int nodes() const { return nodes_; }
  Real at(int from, int to) const { return values_[index(from, to)]; }
  void set(int from, int to, Real v) { values_[index(from, to)] = v; }
  std::span<const Real> row(int from) const {
    return std::span<const Real>(values_).subspan(static_cast<std::size_t>(from) * static_cast<std::size_t>(nodes_),
                                                  static_cast<std::size_t>(nodes_));
  }
  std::span<const Real> values() const { return values_; }
  void reset() { std::fill(values_.begin(), values_.end(), Real(1)); }

  friend bool operator==(const QTable&, const QTable&) = default;

 private:
  std::size_t index(int from, int to) const {
    if (from < 0 || to < 0 || from >= nodes_ || to >= nodes_) throw Error("q-table index out of range");
    return static_cast<std::size_t>(from) * static_cast<std::size_t>(nodes_) + static_cast<std::size_t>(to);
  }

  int nodes_ = 0;
  std::vector<Real> values_;
};

/// score[a] = q[a]^alpha * row[a] over feasible a, renormalized to sum 1.
/// Proportional normalization is the softmax of the log-scores.
inline void eas_tab_rescore_into(std::span<const Real> q, std::span<const Real> row, Real alpha,
                                 std::span<const std::uint8_t> mask, std::span<Real> out) {
  if (!(alpha > 0)) throw Error("eas_tab_rescore: alpha must be positive");
  bool identity = alpha == Real(1);
  for (std::size_t a = 0; identity && a < q.size(); ++a)
    if (mask[a] && row[a] != Real(1)) identity = false;
  if (identity) {
    for (std::size_t a = 0; a < q.size(); ++a) out[a] = mask[a] ? q[a] : Real(0);
    return;
  }
  Real total = 0;
  for (std::size_t a = 0; a < q.size(); ++a) {
    if (!mask[a]) {
      out[a] = 0;
      continue;
    }
    const Real base = alpha == Real(1) ? q[a] : std::pow(q[a], alpha);
    out[a] = base * row[a];
    total += out[a];
  }
  if (!(total > 0)) throw Error("eas_tab_rescore: all feasible scores are zero");
  for (std::size_t a = 0; a < q.size(); ++a) out[a] /= total;
}

inline std::vector<Real> eas_tab_rescore(std::span<const Real> q, std::span<const Real> row, Real alpha,
                                         std::span<const std::uint8_t> mask) {
  if (row.size() != q.size() || mask.size() != q.size()) throw Error("eas_tab_rescore: length mismatch");
  std::vector<Real> out(q.size());
  eas_tab_rescore_into(q, row, alpha, mask, out);
  return out;
}

/// Rebuilds `table` from an incumbent: the cell of every decided step
/// (previous node -> action) gets max(1, sigma / q^alpha) where q is the
/// base-policy probability of that action; every other cell is 1.
/// Step 0 is the forced start and carries no decision.
inline void eas_tab_update(QTable& table, std::span<const int> actions, std::span<const Real> base_probs, Real sigma,
                           Real alpha) {
  if (base_probs.size() != actions.size()) throw Error("eas_tab_update: one probability per action required");
  table.reset();
  for (std::size_t t = 1; t < actions.size(); ++t) {
    const int from = actions[t - 1];
    const Real q = alpha == Real(1) ? base_probs[t] : std::pow(base_probs[t], alpha);
    table.set(from, actions[t], std::max(Real(1), sigma / q));
  }
}

inline QTable blend_qtables(const QTable& local, const QTable& global, Real beta) {
  if (local.nodes() != global.nodes()) throw Error("blend_qtables: shape mismatch");
  if (!(beta >= 0 && beta <= 1)) throw Error("blend_qtables: beta outside [0, 1]");
  QTable out(local.nodes());
  for (int i = 0; i < local.nodes(); ++i)
    for (int j = 0; j < local.nodes(); ++j)
      out.set(i, j, (1 - beta) * local.at(i, j) + beta * global.at(i, j));
  return out;
}

}  // namespace eas
