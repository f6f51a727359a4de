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

// Per-instance test-time search: greedy, sampling, active search and the
// three efficient variants that adapt keys, an adapter layer or a table.

#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "eas/model.hpp"
#include "eas/optim.hpp"
#include "eas/parallel.hpp"
#include "eas/qtable.hpp"

namespace eas {

enum class Strategy { kGreedy, kSampling, kActiveSearch, kEasEmb, kEasLay, kEasTab };

inline const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::kGreedy: return "greedy";
    case Strategy::kSampling: return "sampling";
    case Strategy::kActiveSearch: return "active-search";
    case Strategy::kEasEmb: return "eas-emb";
    case Strategy::kEasLay: return "eas-lay";
    case Strategy::kEasTab: return "eas-tab";
  }
  return "?";
}

inline Strategy parse_strategy(const std::string& s) {
  for (Strategy k : {Strategy::kGreedy, Strategy::kSampling, Strategy::kActiveSearch, Strategy::kEasEmb,
                     Strategy::kEasLay, Strategy::kEasTab})
    if (s == strategy_name(k)) return k;
  throw Error("unknown strategy '" + s + "'");
}

inline bool is_gradient_strategy(Strategy s) {
  return s == Strategy::kActiveSearch || s == Strategy::kEasEmb || s == Strategy::kEasLay;
}

struct SearchConfig {
  Strategy strategy = Strategy::kEasEmb;
  int iterations = 200;
  int augmentations = 8;
  int starts = 0;  // 0: one per candidate start node
  double lambda = 0.01;
  double alpha = 1.0;
  double sigma = 10.0;
  double lr = 0;  // 0: strategy default
  std::uint64_t seed = 1;
  int copies = 1;
  bool active_search_il = false;

  double effective_lr() const {
    if (lr > 0) return lr;
    return strategy == Strategy::kActiveSearch ? 2.6e-4 : 0.01;
  }
  int effective_iterations() const { return strategy == Strategy::kGreedy ? 1 : iterations; }
  int effective_starts(const Instance& inst) const { return starts > 0 ? std::min(starts, inst.n) : inst.n; }
  bool uses_imitation() const {
    if (strategy == Strategy::kActiveSearch) return active_search_il && lambda > 0;
    return (strategy == Strategy::kEasEmb || strategy == Strategy::kEasLay) && lambda > 0;
  }
  long long solutions_per_instance(const Instance& inst) const {
    return static_cast<long long>(effective_iterations()) * augmentations * effective_starts(inst) * copies;
  }
};

inline void validate(const SearchConfig& c) {
  if (c.iterations < 1) throw Error("iterations must be positive");
  if (c.augmentations < 1 || c.augmentations > 8) throw Error("augmentations must lie in 1..8");
  if (c.starts < 0) throw Error("starts must be non-negative");
  if (!(c.lambda >= 0)) throw Error("lambda must be non-negative");
  if (!(c.alpha > 0)) throw Error("alpha must be positive");
  if (!(c.sigma > 0)) throw Error("sigma must be positive");
  if (!(c.lr >= 0)) throw Error("learning rate must be non-negative");
  if (c.copies < 1) throw Error("copies must be positive");
}

struct Incumbent {
  std::optional<Solution> best;

  bool empty() const { return !best.has_value(); }
  double cost() const { return best ? best->cost : std::numeric_limits<double>::infinity(); }
};

/// Replaces the incumbent only on a strictly lower cost; returns whether it
/// changed.
inline bool update_incumbent(Incumbent& inc, std::span<const Solution> candidates) {
  bool changed = false;
  for (const Solution& s : candidates) {
    if (inc.empty() || s.cost < inc.best->cost) {
      inc.best = s;
      changed = true;
    }
  }
  return changed;
}

struct IterationRecord {
  int instance_id = 0;
  int iteration = 0;  // 1-based
  double mean_sampled_cost = 0;
  double best_sampled_cost = 0;
  double incumbent_cost = 0;
  double wall_ms = 0;  // since the instance's search began
};

struct InstanceResult {
  int instance_id = 0;
  Solution best;
  std::vector<IterationRecord> trajectory;
  long long solutions_sampled = 0;
  int encode_count = 0;
  int skipped_updates = 0;
  double wall_ms = 0;
};

using WarningSink = std::function<void(const std::string&)>;

inline void warn_stderr(const std::string& msg) { std::cerr << "warning: " << msg << '\n'; }

/// Weights of one augmentation's tape: (c - b) / (A * S) on sampled rows,
/// with b the mean over that augmentation's starts, and -lambda / A on the
/// teacher-forced incumbent row when present.
inline std::vector<Real> search_loss_weights(std::span<const Solution> sampled, int augmentations, double lambda,
                                             bool with_incumbent) {
  const auto s = static_cast<double>(sampled.size());
  double mean = 0;
  for (const auto& sol : sampled) mean += sol.cost / s;
  std::vector<Real> w;
  for (const auto& sol : sampled) w.push_back(static_cast<Real>((sol.cost - mean) / (augmentations * s)));
  if (with_incumbent) w.push_back(static_cast<Real>(-lambda / augmentations));
  return w;
}

/// Stateless view of the frozen model shared by every search worker.
struct SearchContext {
  const PolicyModel& model;
  const SearchConfig& config;
  WarningSink warn = warn_stderr;
};

namespace detail {

struct SampledBatch {
  std::vector<Solution> sampled;  // augmentation-major
  GradientMap grads;
};

inline std::vector<RowSpec> make_rows(std::span<const int> starts, const Solution* incumbent) {
  std::vector<RowSpec> rows;
  for (int s : starts) rows.push_back({s, nullptr});
  if (incumbent) rows.push_back({incumbent->actions.front(), &incumbent->actions});
  return rows;
}

// Samples one augmentation and, for gradient strategies, backpropagates the
// combined loss into `grads` keyed by `targets`.
template <typename BuildVars>
void sample_augmentation(const Instance& inst, std::span<const int> starts, const Solution* incumbent,
                         const SearchConfig& cfg, Rng& rng, DecodeMode mode, const TabRescore* rescore,
                         const std::vector<std::string>& targets, BuildVars&& build, SampledBatch& out) {
  Tape tape;
  const DecoderVars dv = build(tape);
  const auto rows = make_rows(starts, incumbent);
  DecodeOptions opt;
  opt.mode = mode;
  opt.rng = &rng;
  opt.rescore = rescore;
  opt.track_log_prob = !targets.empty();
  BatchRollout r = decode_batch(dv, inst, rows, opt);
  const std::size_t sampled = starts.size();
  if (!targets.empty()) {
    const auto w = search_loss_weights(std::span<const Solution>(r.solutions).first(sampled), cfg.augmentations,
                                       cfg.lambda, incumbent != nullptr);
    accumulate(out.grads, tape.backprop(weighted_log_prob(r, w), Tensor::scalar(1), targets));
  }
  for (std::size_t i = 0; i < sampled; ++i) out.sampled.push_back(std::move(r.solutions[i]));
}

inline void check_incumbents(std::span<const Solution> incumbents, std::size_t augmentations) {
  if (!incumbents.empty() && incumbents.size() != augmentations)
    throw Error("search update: expected one incumbent per augmentation or none");
}

inline const Solution* row_for(std::span<const Solution> incumbents, std::size_t k) {
  return incumbents.empty() ? nullptr : &incumbents[k];
}

inline std::string keys_name(int k) { return "keys." + std::to_string(k); }

// Base-policy probabilities of every incumbent action under augmentation k.
inline std::vector<Real> base_probs(const PolicyModel& model, const StaticEmbeddings& emb, const Instance& inst,
                                    const Solution& incumbent) {
  Tape tape;
  const RowSpec row{incumbent.actions.front(), &incumbent.actions};
  return decode_batch(decoder_vars(tape, emb, model), inst, std::span<const RowSpec>(&row, 1), DecodeOptions{})
      .solutions[0]
      .probs;
}

// The same solution traversed backwards: TSP keeps the start city, CVRP
// reverses the whole sequence (every route flips, loads are unchanged).
inline Solution reversed(const Instance& inst, const Solution& s) {
  Solution r = s;
  std::reverse(r.actions.begin() + (inst.kind == ProblemKind::kTsp ? 1 : 0), r.actions.end());
  return r;
}

struct Oriented {
  Solution solution;
  std::vector<Real> probs;
};

// Mirrored augmentations flip the policy's preferred direction of travel, so
// each view imitates and tabulates whichever direction it finds more likely.
inline Oriented oriented(const PolicyModel& model, const StaticEmbeddings& emb, const Instance& inst,
                         const Solution& incumbent) {
  auto log_likelihood = [](std::span<const Real> p) {
    double total = 0;
    for (Real x : p) total += std::log(static_cast<double>(x));
    return total;
  };
  Oriented fwd{incumbent, base_probs(model, emb, inst, incumbent)};
  Solution back = reversed(inst, incumbent);
  std::vector<Real> back_probs = base_probs(model, emb, inst, back);
  if (log_likelihood(back_probs) > log_likelihood(fwd.probs)) return {std::move(back), std::move(back_probs)};
  return fwd;
}

}  // namespace detail

/// Sampled solutions of one iteration (augmentation-major) and whether the
/// parameter update was applied.
struct UpdateOutcome {
  std::vector<Solution> sampled;
  bool applied = true;
};

/// One iteration of embedding search: `keys` holds one trainable key matrix
/// per augmentation (keys.0, keys.1, ...); all other tensors stay frozen.
/// `incumbents` is empty or holds the imitation target of each augmentation.
inline UpdateOutcome eas_emb_update(const PolicyModel& model, std::span<const StaticEmbeddings> emb,
                                    const Instance& inst, NamedParamSet& keys, Adam& adam, std::span<const int> starts,
                                    std::span<const Solution> incumbents, const SearchConfig& cfg, Rng& rng) {
  detail::check_incumbents(incumbents, emb.size());
  detail::SampledBatch batch;
  for (std::size_t k = 0; k < emb.size(); ++k) {
    const std::string name = detail::keys_name(static_cast<int>(k));
    detail::SampledBatch part;
    detail::sample_augmentation(inst, starts, detail::row_for(incumbents, k), cfg, rng, DecodeMode::kSample, nullptr, {"keys"},
                                [&](Tape& tape) { return decoder_vars(tape, emb[k], model, tape.leaf(keys.get(name), "keys")); },
                                part);
    batch.grads.emplace(name, std::move(part.grads.at("keys")));
    for (auto& s : part.sampled) batch.sampled.push_back(std::move(s));
  }
  return {std::move(batch.sampled), apply_if_finite(keys, adam, batch.grads)};
}

/// One iteration of adapter search; a single adapter is shared by all
/// augmentations.
inline UpdateOutcome eas_lay_update(const PolicyModel& model, std::span<const StaticEmbeddings> emb,
                                    const Instance& inst, NamedParamSet& adapter, Adam& adam, std::span<const int> starts,
                                    std::span<const Solution> incumbents, const SearchConfig& cfg, Rng& rng) {
  detail::check_incumbents(incumbents, emb.size());
  detail::SampledBatch batch;
  for (std::size_t k = 0; k < emb.size(); ++k)
    detail::sample_augmentation(inst, starts, detail::row_for(incumbents, k), cfg, rng, DecodeMode::kSample, nullptr,
                                adapter.trainable_names(),
                                [&](Tape& tape) {
                                  DecoderVars dv = decoder_vars(tape, emb[k], model);
                                  dv.adapter = bind_adapter(bind(tape, adapter));
                                  return dv;
                                },
                                batch);
  return {std::move(batch.sampled), apply_if_finite(adapter, adam, batch.grads)};
}

/// One iteration of full-parameter search on a private copy `theta`. Every
/// augmentation is re-encoded because the encoder weights move.
inline UpdateOutcome active_search_update(const ModelConfig& config, std::span<const Instance> views,
                                          const Instance& inst, NamedParamSet& theta, Adam& adam,
                                          std::span<const int> starts, std::span<const Solution> incumbents,
                                          const SearchConfig& cfg, Rng& rng) {
  detail::check_incumbents(incumbents, views.size());
  detail::SampledBatch batch;
  for (std::size_t k = 0; k < views.size(); ++k)
    detail::sample_augmentation(inst, starts, detail::row_for(incumbents, k), cfg, rng, DecodeMode::kSample, nullptr,
                                theta.trainable_names(),
                                [&](Tape& tape) {
                                  const auto vars = bind(tape, theta);
                                  return decoder_vars(encode(tape, vars, views[k], config), vars, config);
                                },
                                batch);
  return {std::move(batch.sampled), apply_if_finite(theta, adam, batch.grads)};
}

/// Samples every augmentation without any update, optionally through
/// per-augmentation tables.
inline std::vector<Solution> sample_frozen(const PolicyModel& model, std::span<const StaticEmbeddings> emb,
                                           const Instance& inst, std::span<const int> starts, DecodeMode mode,
                                           const std::vector<const QTable*>& tables, Real alpha, const SearchConfig& cfg,
                                           Rng& rng) {
  detail::SampledBatch batch;
  for (std::size_t k = 0; k < emb.size(); ++k) {
    std::optional<TabRescore> rescore;
    if (!tables.empty()) rescore = TabRescore{tables[k], alpha};
    detail::sample_augmentation(inst, starts, nullptr, cfg, rng, mode, rescore ? &*rescore : nullptr, {},
                                [&](Tape& tape) { return decoder_vars(tape, emb[k], model); }, batch);
  }
  return std::move(batch.sampled);
}

namespace detail {

struct Copy {
  Rng rng;
  Incumbent local;
  NamedParamSet dynamic;  // keys.k, adapter or full parameters
  Adam adam;
  std::vector<QTable> local_tables;
};

}  // namespace detail

/// Runs the configured strategy on one instance.
inline InstanceResult search_instance(const SearchContext& ctx, const Instance& inst, int instance_id) {
  const PolicyModel& model = ctx.model;
  const SearchConfig& cfg = ctx.config;
  validate(cfg);
  validate(inst);
  if (inst.kind != model.config.kind) throw Error("checkpoint kind does not match instance kind");
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed_ms = [&] { return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count(); };

  InstanceResult res;
  res.instance_id = instance_id;
  const int augs = cfg.augmentations;
  const int iters = cfg.effective_iterations();
  const std::vector<int> starts = default_starts(inst, cfg.effective_starts(inst));
  const Strategy strat = cfg.strategy;
  const DecodeMode mode = strat == Strategy::kGreedy ? DecodeMode::kGreedy : DecodeMode::kSample;
  const bool active = strat == Strategy::kActiveSearch;
  const Real tab_alpha = static_cast<Real>(cfg.alpha);

  std::vector<Instance> views;
  for (int k = 0; k < augs; ++k) views.push_back(augment(inst, k));
  // Active search only needs base embeddings to orient its imitation rows.
  std::vector<StaticEmbeddings> emb;
  if (!active || cfg.uses_imitation()) {
    for (const auto& v : views) emb.push_back(encode(model, v));
    res.encode_count += augs;
  }

  const std::uint64_t instance_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(instance_id));
  std::vector<detail::Copy> copies;
  for (int c = 0; c < cfg.copies; ++c) {
    detail::Copy copy{Rng(derive_seed(instance_seed, static_cast<std::uint64_t>(c))), {}, {},
                      Adam(AdamOptions{static_cast<Real>(cfg.effective_lr())}), {}};
    if (strat == Strategy::kEasEmb) {
      for (int k = 0; k < augs; ++k) copy.dynamic.add(detail::keys_name(k), emb[static_cast<std::size_t>(k)].keys);
    } else if (strat == Strategy::kEasLay) {
      Rng init(derive_seed(instance_seed, 1000 + static_cast<std::uint64_t>(c)));
      copy.dynamic = make_adapter(model.config.d, model.config.adapter_hidden, init);
    } else if (active) {
      copy.dynamic = model.params;
    } else if (strat == Strategy::kEasTab) {
      copy.local_tables.assign(static_cast<std::size_t>(augs), QTable(inst.node_count()));
    }
    copies.push_back(std::move(copy));
  }
  Incumbent global;
  std::vector<QTable> global_tables(strat == Strategy::kEasTab ? static_cast<std::size_t>(augs) : 0, QTable(inst.node_count()));

  auto rebuild_tables = [&](std::vector<QTable>& tables, const Solution& inc) {
    for (int k = 0; k < augs; ++k) {
      const auto o = detail::oriented(model, emb[static_cast<std::size_t>(k)], inst, inc);
      eas_tab_update(tables[static_cast<std::size_t>(k)], o.solution.actions, o.probs, static_cast<Real>(cfg.sigma),
                     tab_alpha);
    }
  };
  // Imitation rows follow the global incumbent as of the start of an iteration.
  std::vector<Solution> imitation;

  for (int it = 1; it <= iters; ++it) {
    std::vector<Solution> all;
    const Real beta = iters > 1 ? static_cast<Real>(it - 1) / static_cast<Real>(iters - 1) : Real(1);
    for (auto& copy : copies) {
      const std::span<const Solution> inc(imitation);
      UpdateOutcome step;
      if (strat == Strategy::kEasEmb) {
        step = eas_emb_update(model, emb, inst, copy.dynamic, copy.adam, starts, inc, cfg, copy.rng);
      } else if (strat == Strategy::kEasLay) {
        step = eas_lay_update(model, emb, inst, copy.dynamic, copy.adam, starts, inc, cfg, copy.rng);
      } else if (active) {
        step = active_search_update(model.config, views, inst, copy.dynamic, copy.adam, starts, inc, cfg, copy.rng);
        res.encode_count += augs;
      } else {
        std::vector<QTable> blended;
        std::vector<const QTable*> tables;
        if (strat == Strategy::kEasTab) {
          if (cfg.copies > 1)
            for (std::size_t k = 0; k < copy.local_tables.size(); ++k)
              blended.push_back(blend_qtables(copy.local_tables[k], global_tables[k], beta));
          for (const QTable& t : cfg.copies > 1 ? blended : copy.local_tables) tables.push_back(&t);
        }
        step.sampled = sample_frozen(model, emb, inst, starts, mode, tables, tab_alpha, cfg, copy.rng);
      }
      if (!step.applied) {
        ++res.skipped_updates;
        if (ctx.warn)
          ctx.warn("instance " + std::to_string(instance_id) + " iteration " + std::to_string(it) +
                   ": non-finite gradient, update skipped");
      }
      const bool local_changed = update_incumbent(copy.local, step.sampled);
      if (strat == Strategy::kEasTab && local_changed) rebuild_tables(copy.local_tables, *copy.local.best);
      for (auto& s : step.sampled) all.push_back(std::move(s));
    }
    const bool global_changed = update_incumbent(global, all);
    if (strat == Strategy::kEasTab && cfg.copies > 1 && global_changed) rebuild_tables(global_tables, *global.best);
    if (cfg.uses_imitation() && global_changed) {
      imitation.clear();
      for (const auto& e : emb) imitation.push_back(detail::oriented(model, e, inst, *global.best).solution);
    }

    IterationRecord rec;
    rec.instance_id = instance_id;
    rec.iteration = it;
    double total = 0;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : all) {
      total += s.cost;
      best = std::min(best, s.cost);
    }
    rec.mean_sampled_cost = total / static_cast<double>(all.size());
    rec.best_sampled_cost = best;
    rec.incumbent_cost = global.cost();
    rec.wall_ms = elapsed_ms();
    res.trajectory.push_back(rec);
    res.solutions_sampled += static_cast<long long>(all.size());
  }
  res.best = *global.best;
  res.wall_ms = elapsed_ms();
  return res;
}

/// Searches every instance; instances are distributed over workers and the
/// results come back in input order.
inline std::vector<InstanceResult> run_search(const PolicyModel& model, std::span<const Instance> instances,
                                              const SearchConfig& config, int workers = worker_count(),
                                              WarningSink warn = warn_stderr) {
  validate(config);
  for (std::size_t i = 0; i < instances.size(); ++i)
    if (instances[i].kind != model.config.kind)
      throw Error("instance " + std::to_string(i) + " is " + kind_name(instances[i].kind) + " but the checkpoint is " +
                  kind_name(model.config.kind));
  std::vector<InstanceResult> out(instances.size());
  const SearchContext ctx{model, config, std::move(warn)};
  parallel_for(
      instances.size(), [&](std::size_t i) { out[i] = search_instance(ctx, instances[i], static_cast<int>(i)); },
      workers);
  return out;
}

}  // namespace eas
