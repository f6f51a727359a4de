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

// Attention-based construction policy.
//
// The encoder maps node features to static embeddings once per instance:
//
//   H0 = X W_in + b_in
//   H1 = H0 + softmax(H0Wq (H0Wk)^T / sqrt(d)) H0Wv Wo
//   E  = H1 + relu(H1 W1 + b1) W2 + b2
//
// and derives from E everything the decoder reads: single-head keys
// K = E W_key, glimpse keys/values, the graph embedding mean(E) and the
// context projections. A decoding step for a batch of partial solutions is
//
//   q0 = mean(E) W_g + E[cur] W_c + (E[start] W_s | cap/capacity * w_cap)
//   q  = softmax_masked(q0 GK^T / sqrt(d)) GV W_o
//   q  = q + relu(q A1 + a1) A2 + a2                  (optional adapter)
//   p  = softmax_masked(C * tanh(q K^T / sqrt(d)))
//
// The adapter sits on the query that enters the single attention head.

#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eas/autodiff.hpp"
#include "eas/problems.hpp"
#include "eas/qtable.hpp"
#include "eas/random.hpp"

namespace eas {

struct ModelConfig {
  ProblemKind kind = ProblemKind::kTsp;
  int d = 64;
  int adapter_hidden = 64;
  Real clip = 10;

  int features() const { return kind == ProblemKind::kTsp ? 2 : 3; }
  int ff_hidden() const { return 2 * d; }
};

namespace names {
inline const std::string kInW = "enc.in.W";
inline const std::string kInB = "enc.in.b";
inline const std::string kAttnQ = "enc.attn.Wq";
inline const std::string kAttnK = "enc.attn.Wk";
inline const std::string kAttnV = "enc.attn.Wv";
inline const std::string kAttnO = "enc.attn.Wo";
inline const std::string kFfW1 = "enc.ff.W1";
inline const std::string kFfB1 = "enc.ff.b1";
inline const std::string kFfW2 = "enc.ff.W2";
inline const std::string kFfB2 = "enc.ff.b2";
inline const std::string kKey = "dec.key.W";
inline const std::string kGlimpseK = "dec.glimpse.Wk";
inline const std::string kGlimpseV = "dec.glimpse.Wv";
inline const std::string kGlimpseO = "dec.glimpse.Wo";
inline const std::string kCtxGraph = "dec.ctx.graph";
inline const std::string kCtxCurrent = "dec.ctx.current";
inline const std::string kCtxStart = "dec.ctx.start";        // TSP
inline const std::string kCtxCapacity = "dec.ctx.capacity";  // CVRP
inline const std::string kAdapterW1 = "adapter.W1";
inline const std::string kAdapterB1 = "adapter.b1";
inline const std::string kAdapterW2 = "adapter.W2";
inline const std::string kAdapterB2 = "adapter.b2";
}  // namespace names

/// Expected parameter shapes for a configuration, in checkpoint order.
inline std::vector<std::pair<std::string, Shape>> parameter_layout(const ModelConfig& c) {
  const auto d = static_cast<std::size_t>(c.d);
  const auto f = static_cast<std::size_t>(c.features());
  const auto h = static_cast<std::size_t>(c.ff_hidden());
  std::vector<std::pair<std::string, Shape>> layout = {
      {names::kInW, {f, d}},      {names::kInB, {d}},         {names::kAttnQ, {d, d}},     {names::kAttnK, {d, d}},
      {names::kAttnV, {d, d}},    {names::kAttnO, {d, d}},    {names::kFfW1, {d, h}},      {names::kFfB1, {h}},
      {names::kFfW2, {h, d}},     {names::kFfB2, {d}},        {names::kKey, {d, d}},       {names::kGlimpseK, {d, d}},
      {names::kGlimpseV, {d, d}}, {names::kGlimpseO, {d, d}}, {names::kCtxGraph, {d, d}}, {names::kCtxCurrent, {d, d}},
  };
  if (c.kind == ProblemKind::kTsp) {
    layout.push_back({names::kCtxStart, {d, d}});
  } else {
    layout.push_back({names::kCtxCapacity, {1, d}});
  }
  return layout;
}

inline void validate(const ModelConfig& c) {
  if (c.d < 8 || c.d % 2 != 0) throw Error("embedding width d must be even and >= 8, got " + std::to_string(c.d));
  if (c.adapter_hidden < 1) throw Error("adapter hidden width must be positive");
  if (!(c.clip > 0)) throw Error("logit clipping constant must be positive");
}

// Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)]; fan_in is the leading dimension.
inline Tensor uniform_tensor(const Shape& shape, Rng& rng) {
  const std::size_t fan_in = shape[0];
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::size_t count = 1;
  for (std::size_t s : shape) count *= s;
  std::vector<Real> v(count);
  for (Real& x : v) x = static_cast<Real>((2 * uniform01(rng) - 1) * bound);
  return Tensor(shape, std::move(v));
}

struct PolicyModel {
  ModelConfig config;
  NamedParamSet params;
};

inline PolicyModel init_policy(const ModelConfig& config, std::uint64_t seed) {
  validate(config);
  Rng rng(seed);
  PolicyModel model{config, {}};
  for (const auto& [name, shape] : parameter_layout(config)) model.params.add(name, uniform_tensor(shape, rng));
  return model;
}

/// Instance-specific residual layer with zero-initialized output weights, so
/// it is the identity until its first update.
inline NamedParamSet make_adapter(int d, int hidden, Rng& rng) {
  const auto dd = static_cast<std::size_t>(d);
  const auto hh = static_cast<std::size_t>(hidden);
  NamedParamSet p;
  p.add(names::kAdapterW1, uniform_tensor({dd, hh}, rng));
  p.add(names::kAdapterB1, uniform_tensor({hh}, rng));
  p.add(names::kAdapterW2, Tensor({hh, dd}, std::vector<Real>(hh * dd, Real(0))));
  p.add(names::kAdapterB2, Tensor({dd}, std::vector<Real>(dd, Real(0))));
  return p;
}

/// Node features: (x, y) for TSP, (x, y, demand / capacity) for CVRP.
inline Tensor node_features(const Instance& inst) {
  const auto nodes = static_cast<std::size_t>(inst.node_count());
  const std::size_t f = inst.kind == ProblemKind::kTsp ? 2 : 3;
  std::vector<Real> x(nodes * f);
  for (std::size_t i = 0; i < nodes; ++i) {
    x[i * f] = static_cast<Real>(inst.coords[i].x);
    x[i * f + 1] = static_cast<Real>(inst.coords[i].y);
    if (f == 3) x[i * f + 2] = static_cast<Real>(inst.demands[i]) / static_cast<Real>(inst.capacity);
  }
  return Tensor({nodes, f}, std::move(x));
}

/// Everything the decoder reads from an encoded instance, as tape entries.
struct EmbeddingVars {
  Var nodes;           // N x d
  Var keys;            // N x d, single-head keys
  Var glimpse_keys;    // N x d
  Var glimpse_values;  // N x d
  Var graph;           // 1 x d
  Var ctx_graph;       // 1 x d
  Var ctx_current;     // N x d
  std::optional<Var> ctx_start;  // N x d, TSP
};

/// The same quantities as plain tensors, computed once and reused.
struct StaticEmbeddings {
  Tensor nodes;
  Tensor keys;
  Tensor glimpse_keys;
  Tensor glimpse_values;
  Tensor graph;
  Tensor ctx_graph;
  Tensor ctx_current;
  std::optional<Tensor> ctx_start;
};

inline EmbeddingVars encode(Tape& tape, const std::map<std::string, Var>& p, const Instance& inst, const ModelConfig& cfg) {
  const Tensor x = node_features(inst);
  if (static_cast<int>(x.cols()) != cfg.features())
    throw Error("encoder expects " + std::to_string(cfg.features()) + " features, instance has " + std::to_string(x.cols()));
  const Real inv_sqrt_d = Real(1) / std::sqrt(static_cast<Real>(cfg.d));
  Var h0 = add(matmul(tape.constant(x), p.at(names::kInW)), p.at(names::kInB));
  Var q = matmul(h0, p.at(names::kAttnQ));
  Var k = matmul(h0, p.at(names::kAttnK));
  Var v = matmul(h0, p.at(names::kAttnV));
  const std::size_t nodes = x.rows();
  Var attn = masked_softmax(scale(matmul(q, transpose(k)), inv_sqrt_d), std::vector<std::uint8_t>(nodes * nodes, 1));
  Var h1 = add(h0, matmul(matmul(attn, v), p.at(names::kAttnO)));
  Var ff = add(matmul(relu(add(matmul(h1, p.at(names::kFfW1)), p.at(names::kFfB1))), p.at(names::kFfW2)), p.at(names::kFfB2));
  Var e = add(h1, ff);

  EmbeddingVars out;
  out.nodes = e;
  out.keys = matmul(e, p.at(names::kKey));
  out.glimpse_keys = matmul(e, p.at(names::kGlimpseK));
  out.glimpse_values = matmul(e, p.at(names::kGlimpseV));
  out.graph = mean_rows(e);
  out.ctx_graph = matmul(out.graph, p.at(names::kCtxGraph));
  out.ctx_current = matmul(e, p.at(names::kCtxCurrent));
  if (cfg.kind == ProblemKind::kTsp) out.ctx_start = matmul(e, p.at(names::kCtxStart));
  return out;
}

inline StaticEmbeddings encode(const PolicyModel& model, const Instance& inst) {
  if (inst.kind != model.config.kind) throw Error("encode: instance kind does not match the model");
  Tape tape;
  std::map<std::string, Var> p;
  for (const auto& e : model.params.entries()) p.emplace(e.name, tape.constant(e.value));
  const EmbeddingVars v = encode(tape, p, inst, model.config);
  StaticEmbeddings s{v.nodes.value(),  v.keys.value(),      v.glimpse_keys.value(), v.glimpse_values.value(),
                     v.graph.value(),  v.ctx_graph.value(), v.ctx_current.value(),  std::nullopt};
  if (v.ctx_start) s.ctx_start = v.ctx_start->value();
  return s;
}

/// Decoder inputs on one tape. Built once per tape and shared by all steps.
struct DecoderVars {
  Var keys_t;           // d x N
  Var glimpse_keys_t;   // d x N
  Var glimpse_values;   // N x d
  Var glimpse_out;      // d x d
  Var ctx_graph;        // 1 x d
  Var ctx_current;      // N x d
  std::optional<Var> ctx_start;
  std::optional<Var> w_capacity;
  struct Adapter {
    Var w1, b1, w2, b2;
  };
  std::optional<Adapter> adapter;
  Real inv_sqrt_d = 1;
  Real clip = 10;
};

inline DecoderVars::Adapter bind_adapter(const std::map<std::string, Var>& a) {
  return {a.at(names::kAdapterW1), a.at(names::kAdapterB1), a.at(names::kAdapterW2), a.at(names::kAdapterB2)};
}

inline DecoderVars decoder_vars(const EmbeddingVars& emb, const std::map<std::string, Var>& p, const ModelConfig& cfg) {
  DecoderVars v;
  v.keys_t = transpose(emb.keys);
  v.glimpse_keys_t = transpose(emb.glimpse_keys);
  v.glimpse_values = emb.glimpse_values;
  v.glimpse_out = p.at(names::kGlimpseO);
  v.ctx_graph = emb.ctx_graph;
  v.ctx_current = emb.ctx_current;
  v.ctx_start = emb.ctx_start;
  if (cfg.kind == ProblemKind::kCvrp) v.w_capacity = p.at(names::kCtxCapacity);
  v.inv_sqrt_d = Real(1) / std::sqrt(static_cast<Real>(cfg.d));
  v.clip = cfg.clip;
  return v;
}

/// Decoder inputs from precomputed embeddings. Everything is constant except
/// `keys`, which the caller may have placed on the tape as a named leaf.
inline DecoderVars decoder_vars(Tape& tape, const StaticEmbeddings& emb, const PolicyModel& model, Var keys) {
  DecoderVars v;
  v.keys_t = transpose(keys);
  v.glimpse_keys_t = transpose(tape.constant(emb.glimpse_keys));
  v.glimpse_values = tape.constant(emb.glimpse_values);
  v.glimpse_out = tape.constant(model.params.get(names::kGlimpseO));
  v.ctx_graph = tape.constant(emb.ctx_graph);
  v.ctx_current = tape.constant(emb.ctx_current);
  if (emb.ctx_start) v.ctx_start = tape.constant(*emb.ctx_start);
  if (model.config.kind == ProblemKind::kCvrp) v.w_capacity = tape.constant(model.params.get(names::kCtxCapacity));
  v.inv_sqrt_d = Real(1) / std::sqrt(static_cast<Real>(model.config.d));
  v.clip = model.config.clip;
  return v;
}

inline DecoderVars decoder_vars(Tape& tape, const StaticEmbeddings& emb, const PolicyModel& model) {
  return decoder_vars(tape, emb, model, tape.constant(emb.keys));
}

/// One decoding step for a batch of states. Returns the action
/// probabilities (rows x N) as a tape entry.
inline Var decode_probs(const DecoderVars& v, const Instance& inst, std::span<const int> current,
                        std::span<const int> start, std::span<const Real> load, std::vector<std::uint8_t> mask) {
  Tape& tape = *v.keys_t.tape;
  Var q0 = gather_rows(v.ctx_current, std::vector<int>(current.begin(), current.end()));
  if (inst.kind == ProblemKind::kTsp) {
    q0 = add(q0, gather_rows(*v.ctx_start, std::vector<int>(start.begin(), start.end())));
  } else {
    Var cap = tape.constant(Tensor({load.size(), 1}, std::vector<Real>(load.begin(), load.end())));
    q0 = add(q0, matmul(cap, *v.w_capacity));
  }
  q0 = add(q0, v.ctx_graph);
  std::vector<std::uint8_t> glimpse_mask = mask;
  Var attn = masked_softmax(scale(matmul(q0, v.glimpse_keys_t), v.inv_sqrt_d), std::move(glimpse_mask));
  Var q = matmul(matmul(attn, v.glimpse_values), v.glimpse_out);
  if (v.adapter) {
    const auto& a = *v.adapter;
    q = add(q, add(matmul(relu(add(matmul(q, a.w1), a.b1)), a.w2), a.b2));
  }
  Var logits = scale(tanh(scale(matmul(q, v.keys_t), v.inv_sqrt_d)), v.clip);
  return masked_softmax(logits, std::move(mask));
}

enum class DecodeMode { kGreedy, kSample };

/// Tabular rescoring applied on top of the policy's distribution.
struct TabRescore {
  const QTable* table = nullptr;
  Real alpha = 1;
};

struct RowSpec {
  int start = 0;                          // forced first action
  const std::vector<int>* forced = nullptr;  // full action sequence to replay
};

struct DecodeOptions {
  DecodeMode mode = DecodeMode::kSample;
  Rng* rng = nullptr;
  bool track_log_prob = false;
  const TabRescore* rescore = nullptr;
};

struct BatchRollout {
  std::vector<Solution> solutions;  // costs w.r.t. the instance passed in
  std::vector<Real> log_prob;       // per row, sum over decided steps
  struct Step {
    Var log_p;              // active rows x 1
    std::vector<int> rows;  // batch row of each active row
  };
  std::vector<Step> steps;  // filled when track_log_prob is set
};

inline int sample_index(std::span<const Real> p, Rng& rng) {
  const double u = uniform01(rng);
  double acc = 0;
  int last = -1;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0) continue;
    acc += static_cast<double>(p[i]);
    last = static_cast<int>(i);
    if (u < acc) return last;
  }
  return last;
}

inline int argmax_index(std::span<const Real> p) {
  int best = -1;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (best < 0 || p[i] > p[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  return best;
}

/// Constructs one solution per row in lock-step. The first action of every
/// row is forced to its start (probability 1, not decoded). Forced rows
/// replay their sequence and report the probabilities the policy assigns.
inline BatchRollout decode_batch(const DecoderVars& v, const Instance& inst, std::span<const RowSpec> rows,
                                 const DecodeOptions& opt) {
  const std::size_t batch = rows.size();
  const auto nodes = static_cast<std::size_t>(inst.node_count());
  if (batch == 0) throw Error("decode_batch: no rows");
  const bool any_free = std::any_of(rows.begin(), rows.end(), [](const RowSpec& r) { return r.forced == nullptr; });
  if (any_free && opt.mode == DecodeMode::kSample && opt.rng == nullptr)
    throw Error("decode_batch: sampling requires an rng");

  BatchRollout out;
  out.solutions.resize(batch);
  out.log_prob.assign(batch, Real(0));
  std::vector<RolloutState> states(batch, initial_state(inst));
  for (std::size_t r = 0; r < batch; ++r) {
    const int first = rows[r].forced ? rows[r].forced->front() : rows[r].start;
    if (std::string why = infeasibility(inst, states[r], first); !why.empty())
      throw Error("invalid start action " + std::to_string(first) + ": " + why);
    if (inst.kind == ProblemKind::kCvrp && first == 0) throw Error("cvrp rollouts must start at a customer");
    advance(inst, states[r], first);
    out.solutions[r].probs.push_back(Real(1));
  }

  std::vector<int> active, current, start, chosen;
  std::vector<Real> load;
  std::vector<std::uint8_t> mask;
  std::vector<Real> rescored(nodes);
  while (true) {
    active.clear();
    for (std::size_t r = 0; r < batch; ++r)
      if (!is_terminal(inst, states[r])) active.push_back(static_cast<int>(r));
    if (active.empty()) break;
    const std::size_t m = active.size();
    current.resize(m);
    start.resize(m);
    load.resize(m);
    mask.assign(m * nodes, 0);
    for (std::size_t i = 0; i < m; ++i) {
      const RolloutState& s = states[static_cast<std::size_t>(active[i])];
      current[i] = s.current;
      start[i] = s.start;
      load[i] = static_cast<Real>(s.remaining) / static_cast<Real>(std::max(inst.capacity, 1));
      feasible_mask_into(inst, s, std::span<std::uint8_t>(mask).subspan(i * nodes, nodes));
    }
    const std::vector<std::uint8_t> step_mask = mask;
    Var probs = decode_probs(v, inst, current, start, load, std::move(mask));
    const Tensor& p = probs.value();

    chosen.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      const auto r = static_cast<std::size_t>(active[i]);
      RolloutState& s = states[r];
      std::span<const Real> row(p.data() + i * nodes, nodes);
      std::span<const std::uint8_t> row_mask(step_mask.data() + i * nodes, nodes);
      if (opt.rescore) {
        eas_tab_rescore_into(row, opt.rescore->table->row(s.current), opt.rescore->alpha, row_mask, rescored);
        row = rescored;
      }
      int action;
      if (rows[r].forced) {
        const auto& seq = *rows[r].forced;
        if (static_cast<std::size_t>(s.step) >= seq.size())
          throw Error("forced sequence ends before the solution is complete");
        action = seq[static_cast<std::size_t>(s.step)];
        if (action < 0 || static_cast<std::size_t>(action) >= nodes || !row_mask[static_cast<std::size_t>(action)])
          throw Error("forced action " + std::to_string(action) + " is infeasible at step " + std::to_string(s.step));
        if (!(row[static_cast<std::size_t>(action)] > 0))
          throw Error("forced action " + std::to_string(action) + " has zero probability at step " + std::to_string(s.step));
      } else if (opt.mode == DecodeMode::kGreedy) {
        action = argmax_index(row);
      } else {
        action = sample_index(row, *opt.rng);
      }
      chosen[i] = action;
      const Real pa = row[static_cast<std::size_t>(action)];
      out.solutions[r].probs.push_back(pa);
      out.log_prob[r] += std::log(pa);
      advance(inst, s, action);
    }
    if (opt.track_log_prob) out.steps.push_back({log(select(probs, chosen)), active});
  }

  for (std::size_t r = 0; r < batch; ++r) {
    if (rows[r].forced && rows[r].forced->size() != states[r].actions.size())
      throw Error("forced sequence is longer than a complete solution");
    out.solutions[r].actions = std::move(states[r].actions);
    out.solutions[r].cost = solution_cost(inst, out.solutions[r].actions);
  }
  return out;
}

/// sum_r weight[r] * log p(row r) as a 1x1 tape entry.
inline Var weighted_log_prob(const BatchRollout& rollout, std::span<const Real> weights) {
  if (rollout.steps.empty()) throw Error("weighted_log_prob: rollout has no recorded steps");
  std::optional<Var> total;
  for (const auto& step : rollout.steps) {
    std::vector<Real> w(step.rows.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = weights[static_cast<std::size_t>(step.rows[i])];
    Tape& tape = *step.log_p.tape;
    const std::size_t count = w.size();
    Var term = matmul(tape.constant(Tensor({1, count}, std::move(w))), step.log_p);
    total = total ? add(*total, term) : term;
  }
  return *total;
}

/// Single-state distribution over actions, optionally through an adapter
/// and/or tabular rescoring.
inline std::vector<Real> decode_step(const PolicyModel& model, const StaticEmbeddings& emb, const Instance& inst,
                                     const RolloutState& state, const NamedParamSet* adapter = nullptr,
                                     const TabRescore* rescore = nullptr) {
  if (is_terminal(inst, state)) throw Error("decode_step: state is terminal");
  if (state.step == 0) throw Error("decode_step: the first action is a forced start");
  Tape tape;
  DecoderVars v = decoder_vars(tape, emb, model);
  if (adapter) {
    std::map<std::string, Var> a;
    for (const auto& e : adapter->entries()) a.emplace(e.name, tape.constant(e.value));
    v.adapter = bind_adapter(a);
  }
  const int cur[1] = {state.current};
  const int st[1] = {state.start};
  const Real ld[1] = {static_cast<Real>(state.remaining) / static_cast<Real>(std::max(inst.capacity, 1))};
  std::vector<std::uint8_t> mask = feasible_mask(inst, state);
  const std::vector<std::uint8_t> keep = mask;
  Var p = decode_probs(v, inst, cur, st, ld, std::move(mask));
  std::vector<Real> probs = p.value().to_vector();
  if (rescore) return eas_tab_rescore(probs, rescore->table->row(state.current), rescore->alpha, keep);
  return probs;
}

/// All valid multi-start first actions: every city, or every customer.
inline std::vector<int> default_starts(const Instance& inst, int count = 0) {
  std::vector<int> starts;
  const int first = inst.kind == ProblemKind::kTsp ? 0 : 1;
  const int total = inst.n;
  const int take = count <= 0 ? total : std::min(count, total);
  for (int i = 0; i < take; ++i) starts.push_back(first + i);
  return starts;
}

/// One solution per (augmentation, start) pair, augmentation-major. Costs
/// are measured on the original instance.
inline std::vector<Solution> rollout(const PolicyModel& model, const Instance& inst, DecodeMode mode,
                                     std::span<const int> starts, std::span<const int> augmentations, Rng& rng,
                                     const NamedParamSet* adapter = nullptr) {
  if (starts.empty()) throw Error("rollout: at least one start required");
  std::vector<RowSpec> rows;
  for (int s : starts) rows.push_back({s, nullptr});
  std::vector<Solution> out;
  for (int k : augmentations) {
    const StaticEmbeddings emb = encode(model, augment(inst, k));
    Tape tape;
    DecoderVars v = decoder_vars(tape, emb, model);
    if (adapter) {
      std::map<std::string, Var> a;
      for (const auto& e : adapter->entries()) a.emplace(e.name, tape.constant(e.value));
      v.adapter = bind_adapter(a);
    }
    DecodeOptions opt;
    opt.mode = mode;
    opt.rng = &rng;
    BatchRollout r = decode_batch(v, inst, rows, opt);
    for (auto& s : r.solutions) out.push_back(std::move(s));
  }
  return out;
}

/// Replays `incumbent` through the decoder and records it for backprop. The
/// tape holds the frozen model as constants; the adapter (when given) and
/// the keys are named leaves ("keys", adapter names).
struct TeacherForcing {
  std::unique_ptr<Tape> tape;
  Var log_prob;  // 1x1
  Real value = 0;
  std::vector<Real> step_probs;
};

inline TeacherForcing teacher_force(const PolicyModel& model, const Instance& inst, const Solution& incumbent,
                                    const NamedParamSet* adapter = nullptr, int augmentation = 0) {
  solution_cost(inst, incumbent.actions);  // rejects infeasible sequences
  const StaticEmbeddings emb = encode(model, augment(inst, augmentation));
  TeacherForcing tf;
  tf.tape = std::make_unique<Tape>();
  DecoderVars v = decoder_vars(*tf.tape, emb, model, tf.tape->leaf(emb.keys, "keys"));
  if (adapter) v.adapter = bind_adapter(bind(*tf.tape, *adapter));
  const RowSpec row{incumbent.actions.front(), &incumbent.actions};
  DecodeOptions opt;
  opt.track_log_prob = true;
  BatchRollout r = decode_batch(v, inst, std::span<const RowSpec>(&row, 1), opt);
  if (r.steps.empty()) {
    tf.log_prob = tf.tape->constant(Tensor::scalar(0));
  } else {
    const Real one[1] = {1};
    tf.log_prob = weighted_log_prob(r, one);
  }
  tf.value = r.log_prob[0];
  tf.step_probs = r.solutions[0].probs;
  return tf;
}

}  // namespace eas
