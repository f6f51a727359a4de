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

// Acceptance run: prints one PASS/FAIL line per criterion and exits nonzero
// if any criterion fails. The desk-trained checkpoint is cached in the
// directory given as the first argument.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <numeric>
#include <string>
#include <vector>

#include "eas/checkpoint.hpp"
#include "eas/harness.hpp"
#include "eas/oracles.hpp"
#include "eas/qtable.hpp"
#include "eas/stats.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace eas;
using namespace eas::test_support;

namespace {

int failures = 0;

void verdict(int id, bool pass, const std::string& name, const std::string& detail) {
  if (!pass) ++failures;
  std::printf("[%s] %d %s: %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
}

void progress(const std::string& msg) {
  std::fprintf(stderr, "... %s\n", msg.c_str());
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double mean(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

// 1

void gradient_correctness() {
  double worst = 0;
  int checks = 0;
  for (ProblemKind kind : {ProblemKind::kTsp, ProblemKind::kCvrp}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const PolicyModel m = small_model(kind, 8, seed);
      const Instance inst = generate_instance(kind, 5, 100 + seed);
      const Surrogate sur(m, inst, 200 + seed);
      const StaticEmbeddings emb = encode(m, inst);
      const NamedParamSet adapter = random_adapter(m, 300 + seed);
      NamedParamSet keys;
      keys.add("keys", emb.keys);

      const RowSpec forced{sur.incumbent.actions.front(), &sur.incumbent.actions};
      auto tf_loss = [&](const DecoderVars& dv) {
        DecodeOptions opt;
        opt.track_log_prob = true;
        const Real one[1] = {1};
        return weighted_log_prob(decode_batch(dv, inst, std::span<const RowSpec>(&forced, 1), opt), one);
      };
      auto with_keys = [&](auto loss) {
        return [&, loss](Tape& tape, const std::map<std::string, Var>& v) {
          return loss(decoder_vars(tape, emb, m, v.at("keys")));
        };
      };
      auto with_adapter = [&](auto loss) {
        return [&, loss](Tape& tape, const std::map<std::string, Var>& v) {
          DecoderVars dv = decoder_vars(tape, emb, m);
          dv.adapter = bind_adapter(v);
          return loss(dv);
        };
      };
      auto rl_loss = [&](const DecoderVars& dv) { return sur.loss(dv, inst); };

      worst = std::max(worst, static_cast<double>(grad_check(with_keys(rl_loss), keys, Real(1e-6))));
      worst = std::max(worst, static_cast<double>(grad_check(with_adapter(rl_loss), adapter, Real(1e-6))));
      worst = std::max(worst, static_cast<double>(grad_check(with_keys(tf_loss), keys, Real(1e-6))));
      worst = std::max(worst, static_cast<double>(grad_check(with_adapter(tf_loss), adapter, Real(1e-6))));
      checks += 4;
    }
  }
  verdict(1, worst <= 1e-4, "gradient correctness",
          fmt("%.0f checks, max relative error %.3g (limit 1e-4)", checks, worst));
}

// 2

void adapter_inertness() {
  ModelConfig cfg;
  const PolicyModel m = init_policy(cfg, 11);
  Rng arng(12);
  const NamedParamSet adapter = make_adapter(cfg.d, cfg.adapter_hidden, arng);
  double deviation = 0;
  int mismatched = 0;
  for (int i = 0; i < 100; ++i) {
    const Instance inst = generate_instance(ProblemKind::kTsp, 20, derive_seed(13, static_cast<std::uint64_t>(i)));
    const auto starts = default_starts(inst);
    const int augs[1] = {0};
    Rng rng(1);
    const auto base = rollout(m, inst, DecodeMode::kGreedy, starts, augs, rng);
    const auto with = rollout(m, inst, DecodeMode::kGreedy, starts, augs, rng, &adapter);
    const StaticEmbeddings emb = encode(m, inst);
    for (std::size_t r = 0; r < base.size(); ++r) {
      if (base[r].actions != with[r].actions) ++mismatched;
      RolloutState s = initial_state(inst);
      for (std::size_t t = 0; t < base[r].actions.size(); ++t) {
        if (t > 0) {
          const auto p = decode_step(m, emb, inst, s);
          const auto q = decode_step(m, emb, inst, s, &adapter);
          for (std::size_t a = 0; a < p.size(); ++a) deviation = std::max(deviation, std::abs(double(p[a]) - double(q[a])));
        }
        advance(inst, s, base[r].actions[t]);
      }
    }
  }
  verdict(2, mismatched == 0 && deviation <= 1e-12, "adapter inertness",
          fmt("100 instances, %.0f differing rollouts, max probability deviation %.3g", mismatched, deviation));
}

// 3

void tabular_identity() {
  const Real q[5] = {0.1, 0.2, 0.3, 0.15, 0.25};
  const Real ones[5] = {1, 1, 1, 1, 1};
  const std::uint8_t mask[5] = {1, 1, 1, 1, 1};
  const auto out = eas_tab_rescore(q, ones, Real(1), mask);
  const bool identity = std::equal(out.begin(), out.end(), q);

  QTable t(3);
  const int actions[2] = {0, 2};
  const Real half[2] = {1, 0.5};
  eas_tab_update(t, actions, half, Real(10), Real(1));
  const Real lifted = t.at(0, 2);
  eas_tab_update(t, actions, half, Real(0.1), Real(1));
  const Real clamped = t.at(0, 2);
  verdict(3, identity && lifted == Real(20) && clamped == Real(1), "tabular identity",
          fmt("all-ones identity %.0f, sigma=10 q=0.5 -> %g, sigma=0.1 q=0.5 -> %g", identity, lifted, clamped));
}

// 4

double brute_force_tsp(const Instance& inst) {
  std::vector<int> rest(static_cast<std::size_t>(inst.n - 1));
  std::iota(rest.begin(), rest.end(), 1);
  double best = std::numeric_limits<double>::infinity();
  do {
    double len = inst.dist(0, rest.front());
    for (std::size_t i = 1; i < rest.size(); ++i) len += inst.dist(rest[i - 1], rest[i]);
    len += inst.dist(rest.back(), 0);
    best = std::min(best, len);
  } while (std::next_permutation(rest.begin(), rest.end()));
  return best;
}

// Every customer order times every placement of route breaks.
std::vector<double> enumerate_cvrp(const Instance& inst) {
  const std::size_t k = static_cast<std::size_t>(inst.n);
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 1);
  std::vector<double> members;
  do {
    for (std::uint32_t breaks = 0; breaks < (1U << (k - 1)); ++breaks) {
      double total = 0;
      bool feasible = true;
      std::size_t i = 0;
      while (i < k && feasible) {
        std::size_t j = i;
        int load = inst.demands[static_cast<std::size_t>(order[i])];
        double len = inst.dist(0, order[i]);
        while (j + 1 < k && !(breaks >> j & 1U)) {
          ++j;
          load += inst.demands[static_cast<std::size_t>(order[j])];
          len += inst.dist(order[j - 1], order[j]);
        }
        if (load > inst.capacity) feasible = false;
        total = total + len + inst.dist(order[j], 0);
        i = j + 1;
      }
      if (feasible) members.push_back(total);
    }
  } while (std::next_permutation(order.begin(), order.end()));
  return members;
}

void oracle_equivalence() {
  int tsp_equal = 0;
  for (int i = 0; i < 50; ++i) {
    const Instance inst = generate_instance(ProblemKind::kTsp, 8, derive_seed(41, static_cast<std::uint64_t>(i)));
    if (held_karp(inst) == brute_force_tsp(inst)) ++tsp_equal;
  }
  int cvrp_ok = 0;
  long long members_checked = 0;
  for (int i = 0; i < 20; ++i) {
    const Instance inst = generate_instance(ProblemKind::kCvrp, 6, derive_seed(43, static_cast<std::uint64_t>(i)));
    const double opt = cvrp_exact(inst);
    const auto members = enumerate_cvrp(inst);
    members_checked += static_cast<long long>(members.size());
    const bool below_all = std::all_of(members.begin(), members.end(), [&](double c) { return opt <= c; });
    const bool attained = !members.empty() && *std::min_element(members.begin(), members.end()) == opt;
    if (below_all && attained) ++cvrp_ok;
  }
  verdict(4, tsp_equal == 50 && cvrp_ok == 20, "oracle equivalence",
          fmt("held-karp == brute force on %.0f/50, cvrp optimum consistent on %.0f/20 (%.0f feasible members)", tsp_equal,
              cvrp_ok, static_cast<double>(members_checked)));
}

// 5-9

TrainConfig desk_config() {
  TrainConfig c;
  c.kind = ProblemKind::kTsp;
  c.n = 20;
  c.batch = 16;
  c.steps = 30000;
  c.val_size = 64;
  c.val_cadence = 1000;
  c.seed = 2024;
  return c;
}

struct Desk {
  PolicyModel model;
  double cpu_seconds = 0;
  double initial_val = 0;
  double final_val = 0;
};

Desk desk_model(const fs::path& cache) {
  const TrainConfig cfg = desk_config();
  const std::string key = to_json(cfg).dump();
  const fs::path ckpt = cache / "desk_tsp20.bin";
  const fs::path meta = cache / "desk_tsp20.json";
  if (fs::exists(ckpt) && fs::exists(meta)) {
    const auto j = nlohmann::json::parse(read_text(meta));
    if (j.at("config") == nlohmann::json::parse(key)) {
      progress("using cached desk checkpoint " + ckpt.string());
      return {load_checkpoint(ckpt.string(), cfg.model_config()), j.at("cpu_seconds").get<double>(),
              j.at("initial_val").get<double>(), j.at("final_val").get<double>()};
    }
  }
  progress("desk training, " + std::to_string(cfg.steps) + " steps");
  const std::clock_t start = std::clock();
  TrainResult r = train(cfg, [](const CurveRecord& c) {
    progress(fmt("step %.0f  train %.4f  val %.4f", c.step, c.mean_train_cost, c.val_greedy_cost));
  }, 1);
  Desk d{std::move(r.model), double(std::clock() - start) / CLOCKS_PER_SEC, r.initial_val_cost,
         r.curve.empty() ? r.initial_val_cost : r.curve.back().val_greedy_cost};
  fs::create_directories(cache);
  save_checkpoint(d.model, ckpt.string());
  nlohmann::ordered_json j;
  j["config"] = nlohmann::json::parse(key);
  j["cpu_seconds"] = d.cpu_seconds;
  j["initial_val"] = d.initial_val;
  j["final_val"] = d.final_val;
  write_text(meta, j.dump(2) + "\n");
  return d;
}

SearchConfig bench_config(Strategy s) {
  SearchConfig c;
  c.strategy = s;
  c.iterations = 200;
  c.augmentations = 8;
  c.starts = 0;
  c.seed = 7;
  return c;
}

std::vector<double> best_costs(const SearchRun& run) {
  std::vector<double> out;
  for (const auto& r : run.results) out.push_back(r.best.cost);
  return out;
}

double mean_gap(const SearchRun& run) {
  double g = 0;
  for (const auto& r : run.table.rows) g += *r.gap_percent / static_cast<double>(run.table.rows.size());
  return g;
}

std::vector<double> mean_sampled_series(const SearchRun& run) {
  std::vector<double> series(run.results.front().trajectory.size(), 0.0);
  for (const auto& r : run.results)
    for (std::size_t t = 0; t < series.size(); ++t)
      series[t] += r.trajectory[t].mean_sampled_cost / static_cast<double>(run.results.size());
  return series;
}

void search_criteria(const Desk& desk) {
  const std::vector<Instance> instances = generate_set(ProblemKind::kTsp, 20, 100, 9001);
  const Strategy eas_variants[3] = {Strategy::kEasEmb, Strategy::kEasLay, Strategy::kEasTab};
  std::map<Strategy, SearchRun> runs;
  for (Strategy s : {Strategy::kSampling, Strategy::kEasEmb, Strategy::kEasLay, Strategy::kEasTab}) {
    progress(std::string("searching 100 instances with ") + strategy_name(s));
    runs[s] = benchmark(desk.model, instances, bench_config(s), OracleSource::kReference, true, 1);
    if (!runs[s].failures.empty()) throw Error(runs[s].failures.front());
  }

  // 5
  const auto sampling = best_costs(runs[Strategy::kSampling]);
  bool ok5 = desk.cpu_seconds <= 3600;
  std::string detail = fmt("desk training %.0f cpu-s, val greedy %.4f -> %.4f; sampling mean %.5f", desk.cpu_seconds,
                           desk.initial_val, desk.final_val, mean(sampling)) +
                       fmt(" (gap %.3f%% vs 2-opt reference)", mean_gap(runs[Strategy::kSampling]));
  for (Strategy s : eas_variants) {
    const auto costs = best_costs(runs[s]);
    const SignTest t = sign_test(costs, sampling);
    ok5 = ok5 && mean(costs) <= mean(sampling) && t.p_value < 0.05;
    detail += std::string("; ") + strategy_name(s) +
              fmt(" mean %.5f gap %.3f%% (w/l/t %.0f/%.0f", mean(costs), mean_gap(runs[s]), t.wins, t.losses) + fmt("/%.0f", t.ties) + fmt(", p=%.3g)", t.p_value);
  }
  verdict(5, ok5, "search improves over sampling", detail);

  // 6
  bool ok6 = true;
  detail.clear();
  for (Strategy s : eas_variants) {
    const auto series = mean_sampled_series(runs[s]);
    const double drop = (series.front() - series.back()) / series.front();
    ok6 = ok6 && drop >= 0.01;
    detail += std::string(strategy_name(s)) + fmt(" %.4f -> %.4f (%.2f%%); ", series.front(), series.back(), 100 * drop);
  }
  const auto flat = mean_sampled_series(runs[Strategy::kSampling]);
  std::vector<double> xs(flat.size());
  std::iota(xs.begin(), xs.end(), 1.0);
  const SlopeFit fit = fit_slope(xs, flat);
  const bool contains_zero = fit.ci_low <= 0 && 0 <= fit.ci_high;
  ok6 = ok6 && contains_zero;
  detail += fmt("sampling slope %.3g, 95%% CI [%.3g, %.3g]", fit.slope, fit.ci_low, fit.ci_high);
  verdict(6, ok6, "trajectory shape", detail);

  // 7
  int violations = 0;
  long long series_checked = 0;
  const long long budget = 200LL * 8 * 20;
  for (const auto& [s, run] : runs)
    for (const auto& r : run.results) {
      ++series_checked;
      if (r.solutions_sampled != budget) ++violations;
      if (static_cast<int>(r.trajectory.size()) != 200) ++violations;
      for (std::size_t t = 1; t < r.trajectory.size(); ++t)
        if (r.trajectory[t].incumbent_cost > r.trajectory[t - 1].incumbent_cost) ++violations;
    }
  verdict(7, violations == 0, "incumbent monotonicity and budget",
          fmt("%.0f series, %.0f violations, budget %.0f per instance", static_cast<double>(series_checked), violations,
              static_cast<double>(budget)));

  const std::vector<Instance> fifty(instances.begin(), instances.begin() + 50);

  // 8
  progress("lambda sweep on 50 instances");
  const double lambdas[5] = {0, 1e-3, 1e-2, 1e-1, 1};
  const auto lrows = sweep(desk.model, fifty, bench_config(Strategy::kEasEmb), "lambda", lambdas, OracleSource::kNone, 1);
  double best_nonzero = std::numeric_limits<double>::infinity();
  detail.clear();
  for (const auto& r : lrows) {
    if (r.value != 0) best_nonzero = std::min(best_nonzero, r.mean_best_cost);
    detail += fmt("lambda=%g: %.5f; ", r.value, r.mean_best_cost);
  }
  verdict(8, best_nonzero <= lrows.front().mean_best_cost, "lambda ablation direction (soft)", detail);

  // 9
  progress("sigma sweep on 50 instances");
  const double sigmas[2] = {10, 0.1};
  const auto srows = sweep(desk.model, fifty, bench_config(Strategy::kEasTab), "sigma", sigmas, OracleSource::kNone, 1);
  verdict(9, srows[0].mean_best_cost < srows[1].mean_best_cost, "sigma sweep direction",
          fmt("sigma=10: %.5f; sigma=0.1: %.5f", srows[0].mean_best_cost, srows[1].mean_best_cost));
}

// 10

std::string run_to_dir(const ExperimentConfig& base, const fs::path& dir) {
  ExperimentConfig c = base;
  c.out = dir.string();
  if (c.command == "search") cmd_search(c, 1);
  if (c.command == "sweep") cmd_sweep(c, 1);
  std::string bytes;
  for (const char* f : {"results.csv", "trajectory.jsonl", "solutions.jsonl", "sweep.csv"})
    if (fs::exists(dir / f)) bytes += read_text(dir / f);
  // Everything but the output path itself must match.
  auto saved = nlohmann::ordered_json::parse(read_text(dir / "config.json"));
  saved.erase("out");
  return bytes + saved.dump();
}

void determinism(const fs::path& work) {
  fs::remove_all(work);
  fs::create_directories(work);
  cmd_gen(ProblemKind::kTsp, 10, 6, 55, (work / "tsp.jsonl").string());
  cmd_gen(ProblemKind::kCvrp, 8, 4, 56, (work / "cvrp.jsonl").string());
  ModelConfig mc;
  mc.d = 16;
  mc.adapter_hidden = 16;
  save_checkpoint(init_policy(mc, 3), (work / "tsp.bin").string());
  mc.kind = ProblemKind::kCvrp;
  save_checkpoint(init_policy(mc, 4), (work / "cvrp.bin").string());

  int runs = 0, differing = 0;
  for (const char* kind : {"tsp", "cvrp"})
    for (Strategy s : {Strategy::kGreedy, Strategy::kSampling, Strategy::kActiveSearch, Strategy::kEasEmb,
                       Strategy::kEasLay, Strategy::kEasTab}) {
      ExperimentConfig c;
      c.command = "search";
      c.kind = parse_kind(kind);
      c.instances = (work / (std::string(kind) + ".jsonl")).string();
      c.checkpoint = (work / (std::string(kind) + ".bin")).string();
      c.timing = false;
      c.search.strategy = s;
      c.search.iterations = 15;
      c.search.copies = s == Strategy::kEasTab ? 2 : 1;
      const std::string tag = std::string(kind) + "_" + strategy_name(s);
      ++runs;
      if (run_to_dir(c, work / (tag + "_a")) != run_to_dir(c, work / (tag + "_b"))) ++differing;
    }

  ExperimentConfig sw;
  sw.command = "sweep";
  sw.kind = ProblemKind::kTsp;
  sw.instances = (work / "tsp.jsonl").string();
  sw.checkpoint = (work / "tsp.bin").string();
  sw.search.strategy = Strategy::kEasTab;
  sw.search.iterations = 10;
  sw.sweep_param = "sigma";
  sw.sweep_values = {0.1, 10};
  ++runs;
  if (run_to_dir(sw, work / "sweep_a") != run_to_dir(sw, work / "sweep_b")) ++differing;

  TrainConfig tc;
  tc.n = 10;
  tc.d = 16;
  tc.adapter_hidden = 16;
  tc.batch = 4;
  tc.steps = 20;
  tc.val_size = 4;
  tc.val_cadence = 5;
  ++runs;
  const TrainResult t1 = train(tc, {}, 1), t2 = train(tc, {}, 1);
  std::ostringstream c1, c2;
  write_curve_csv(c1, t1.curve);
  write_curve_csv(c2, t2.curve);
  if (serialize_checkpoint(t1.model) != serialize_checkpoint(t2.model) || c1.str() != c2.str()) ++differing;

  verdict(10, differing == 0, "determinism", fmt("%.0f repeated runs, %.0f differing outputs", runs, differing));
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path cache = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_cache");
  try {
    gradient_correctness();
    adapter_inertness();
    tabular_identity();
    oracle_equivalence();
    const Desk desk = desk_model(cache);
    search_criteria(desk);
    determinism(cache / "determinism");
  } catch (const std::exception& e) {
    std::printf("[FAIL] aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%s: %d criterion failures\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
