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

// Multi-start REINFORCE training with the shared per-instance baseline.

#pragma once

#include <cstdint>
#include <functional>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "eas/model.hpp"
#include "eas/optim.hpp"
#include "eas/parallel.hpp"

namespace eas {

struct TrainConfig {
  ProblemKind kind = ProblemKind::kTsp;
  int n = 20;
  int batch = 16;   // instances per step
  int starts = 0;   // 0: all n starts
  int steps = 1000;
  AdamOptions adam{};
  std::uint64_t seed = 1;
  int val_size = 64;
  int val_cadence = 100;
  int d = 64;
  int adapter_hidden = 64;
  Real clip = 10;

  ModelConfig model_config() const {
    ModelConfig c;
    c.kind = kind;
    c.d = d;
    c.adapter_hidden = adapter_hidden;
    c.clip = clip;
    return c;
  }
  int effective_starts() const { return starts > 0 ? starts : n; }
};

inline void validate(const TrainConfig& c) {
  validate(c.model_config());
  if (c.effective_starts() < 2) throw Error("training needs at least 2 starts per instance");
  if (c.effective_starts() > c.n) throw Error("more starts than candidate start nodes");
  if (c.batch < 1) throw Error("batch must be positive");
  if (c.steps < 0) throw Error("steps must be non-negative");
  if (c.val_cadence < 1) throw Error("validation cadence must be positive");
  if (c.val_size < 1) throw Error("validation set must be non-empty");
  if (!(c.adam.lr >= 0)) throw Error("learning rate must be non-negative");
}

inline std::vector<double> pomo_advantages(std::span<const double> costs) {
  if (costs.size() < 2) throw Error("pomo_advantages: need at least 2 costs, got " + std::to_string(costs.size()));
  const double mean = std::accumulate(costs.begin(), costs.end(), 0.0) / static_cast<double>(costs.size());
  std::vector<double> adv(costs.size());
  for (std::size_t i = 0; i < costs.size(); ++i) adv[i] = costs[i] - mean;
  return adv;
}

struct StepStats {
  double mean_cost = 0;
  double baseline = 0;  // mean of the per-instance baselines
  double grad_norm = 0;
  bool skipped = false;
};

/// Gradient of sum_r w_r log p(row r) over every parameter for one instance,
/// sampling `starts` multi-start rollouts. Returns the sampled solutions.
inline std::vector<Solution> policy_gradient(const PolicyModel& model, const Instance& inst, std::span<const int> starts,
                                           double scale, Rng& rng, GradientMap& grads) {
  Tape tape;
  const auto vars = bind(tape, model.params);
  const DecoderVars dv = decoder_vars(encode(tape, vars, inst, model.config), vars, model.config);
  std::vector<RowSpec> rows;
  for (int s : starts) rows.push_back({s, nullptr});
  DecodeOptions opt;
  opt.rng = &rng;
  opt.track_log_prob = true;
  const BatchRollout r = decode_batch(dv, inst, rows, opt);
  std::vector<double> costs;
  for (const auto& s : r.solutions) costs.push_back(s.cost);
  const auto adv = pomo_advantages(costs);
  std::vector<Real> w(adv.size());
  for (std::size_t i = 0; i < adv.size(); ++i) w[i] = static_cast<Real>(adv[i] * scale);
  grads = tape.backprop(weighted_log_prob(r, w), Tensor::scalar(1), model.params.trainable_names());
  return r.solutions;
}

/// One Adam update on the batch. Instance i samples with derive_seed(seed, i)
/// so the result does not depend on the worker count.
inline StepStats reinforce_step(PolicyModel& model, Adam& adam, std::span<const Instance> batch, std::uint64_t seed,
                                int starts, int workers = worker_count()) {
  if (batch.empty()) throw Error("reinforce_step: empty batch");
  std::vector<GradientMap> parts(batch.size());
  std::vector<std::vector<double>> costs(batch.size());
  parallel_for(
      batch.size(),
      [&](std::size_t i) {
        Rng rng(derive_seed(seed, i));
        const auto s = default_starts(batch[i], starts);
        const double scale = 1.0 / (static_cast<double>(batch.size()) * static_cast<double>(s.size()));
        for (const auto& sol : policy_gradient(model, batch[i], s, scale, rng, parts[i])) costs[i].push_back(sol.cost);
      },
      workers);
  GradientMap total;
  StepStats stats;
  double count = 0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    accumulate(total, parts[i]);
    const double mean = std::accumulate(costs[i].begin(), costs[i].end(), 0.0) / static_cast<double>(costs[i].size());
    stats.baseline += mean / static_cast<double>(batch.size());
    stats.mean_cost += std::accumulate(costs[i].begin(), costs[i].end(), 0.0);
    count += static_cast<double>(costs[i].size());
  }
  stats.mean_cost /= count;
  stats.grad_norm = static_cast<double>(global_norm(total));
  stats.skipped = !apply_if_finite(model.params, adam, total);
  return stats;
}

/// Mean over instances of the best greedy multi-start cost (no augmentation).
inline double validation_cost(const PolicyModel& model, std::span<const Instance> instances, int starts,
                              int workers = worker_count()) {
  std::vector<double> best(instances.size());
  parallel_for(
      instances.size(),
      [&](std::size_t i) {
        Rng unused(0);
        const auto sols = rollout(model, instances[i], DecodeMode::kGreedy, default_starts(instances[i], starts),
                                  std::vector<int>{0}, unused);
        double b = sols[0].cost;
        for (const auto& s : sols) b = std::min(b, s.cost);
        best[i] = b;
      },
      workers);
  return std::accumulate(best.begin(), best.end(), 0.0) / static_cast<double>(best.size());
}

struct CurveRecord {
  int step = 0;
  double mean_train_cost = 0;
  double baseline = 0;
  double grad_norm = 0;
  double val_greedy_cost = 0;
};

struct TrainResult {
  PolicyModel model;
  double initial_val_cost = 0;
  std::vector<CurveRecord> curve;
  int skipped_steps = 0;
};

inline constexpr std::uint64_t kTrainInstanceStream = 1;
inline constexpr std::uint64_t kTrainSampleStream = 2;
inline constexpr std::uint64_t kValidationStream = 3;
inline constexpr std::uint64_t kInitStream = 4;

inline std::vector<Instance> validation_set(const TrainConfig& c) {
  std::vector<Instance> v;
  const std::uint64_t base = derive_seed(c.seed, kValidationStream);
  for (int i = 0; i < c.val_size; ++i) v.push_back(generate_instance(c.kind, c.n, derive_seed(base, static_cast<std::uint64_t>(i))));
  return v;
}

using TrainProgress = std::function<void(const CurveRecord&)>;

/// Fresh training instances every step; one curve record per full cadence.
inline TrainResult train(const TrainConfig& c, const TrainProgress& progress = {}, int workers = worker_count()) {
  validate(c);
  TrainResult out;
  out.model = init_policy(c.model_config(), derive_seed(c.seed, kInitStream));
  const auto val = validation_set(c);
  const int starts = c.effective_starts();
  out.initial_val_cost = validation_cost(out.model, val, starts, workers);
  Adam adam(c.adam);
  const std::uint64_t inst_base = derive_seed(c.seed, kTrainInstanceStream);
  const std::uint64_t sample_base = derive_seed(c.seed, kTrainSampleStream);
  std::vector<Instance> batch(static_cast<std::size_t>(c.batch));
  for (int step = 1; step <= c.steps; ++step) {
    for (int i = 0; i < c.batch; ++i) {
      const auto id = static_cast<std::uint64_t>(step - 1) * static_cast<std::uint64_t>(c.batch) + static_cast<std::uint64_t>(i);
      batch[static_cast<std::size_t>(i)] = generate_instance(c.kind, c.n, derive_seed(inst_base, id));
    }
    const StepStats s = reinforce_step(out.model, adam, batch, derive_seed(sample_base, static_cast<std::uint64_t>(step)), starts, workers);
    if (s.skipped) ++out.skipped_steps;
    if (step % c.val_cadence == 0) {
      CurveRecord r{step, s.mean_cost, s.baseline, s.grad_norm, validation_cost(out.model, val, starts, workers)};
      out.curve.push_back(r);
      if (progress) progress(r);
    }
  }
  return out;
}

inline void write_curve_csv(std::ostream& os, std::span<const CurveRecord> curve) {
  os << "step,mean_train_cost,baseline,grad_norm,val_greedy_cost\n";
  os.precision(17);
  for (const auto& r : curve)
    os << r.step << ',' << r.mean_train_cost << ',' << r.baseline << ',' << r.grad_norm << ',' << r.val_greedy_cost << '\n';
}

}  // namespace eas
