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

#include <cstdio>
#include <iostream>

#include "CLI11.hpp"

#include "eas/harness.hpp"

namespace {

using eas::ExperimentConfig;

struct Flags {
  std::string config, cmd, kind, instances, checkpoint, strategy, out, param, oracle, timing;
  int n = 0, count = 0, iters = 0, augs = 0, starts = 0, copies = 0;
  int steps = 0, batch = 0, val_size = 0, val_cadence = 0, d = 0;
  double lambda = 0, alpha = 0, sigma = 0, lr = 0, train_lr = 0;
  std::uint64_t seed = 0;
  bool as_il = false;
  std::vector<double> values;
  std::vector<std::string> inputs;
};

ExperimentConfig assemble(const CLI::App& app, const Flags& f) {
  ExperimentConfig c = f.config.empty() ? ExperimentConfig{} : eas::load_experiment(f.config);
  auto given = [&](const char* name) { return app.get_option(name)->count() > 0; };
  if (given("--cmd")) c.command = f.cmd;
  if (given("--kind")) c.kind = eas::parse_kind(f.kind);
  if (given("--n")) c.n = f.n;
  if (given("--count")) c.count = f.count;
  if (given("--instances")) c.instances = f.instances;
  if (given("--checkpoint")) c.checkpoint = f.checkpoint;
  if (given("--out")) c.out = f.out;
  if (given("--oracle")) c.oracle = f.oracle;
  if (given("--timing")) c.timing = f.timing == "on";
  if (given("--seed")) {
    c.seed = f.seed;
    c.search.seed = f.seed;
    c.train.seed = f.seed;
  }
  if (given("--strategy")) c.search.strategy = eas::parse_strategy(f.strategy);
  if (given("--iters")) c.search.iterations = f.iters;
  if (given("--augs")) c.search.augmentations = f.augs;
  if (given("--starts")) {
    c.search.starts = f.starts;
    c.train.starts = f.starts;
  }
  if (given("--lambda")) c.search.lambda = f.lambda;
  if (given("--alpha")) c.search.alpha = f.alpha;
  if (given("--sigma")) c.search.sigma = f.sigma;
  if (given("--lr")) c.search.lr = f.lr;
  if (given("--copies")) c.search.copies = f.copies;
  if (given("--as-il")) c.search.active_search_il = f.as_il;
  if (given("--param")) c.sweep_param = f.param;
  if (given("--values")) c.sweep_values = f.values;
  if (given("--inputs")) c.inputs = f.inputs;
  c.train.kind = c.kind;
  c.train.n = c.n;
  if (given("--steps")) c.train.steps = f.steps;
  if (given("--batch")) c.train.batch = f.batch;
  if (given("--train-lr")) c.train.adam.lr = static_cast<eas::Real>(f.train_lr);
  if (given("--val-size")) c.train.val_size = f.val_size;
  if (given("--val-cadence")) c.train.val_cadence = f.val_cadence;
  if (given("--d")) {
    c.train.d = f.d;
    c.train.adapter_hidden = f.d;
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Efficient active search for routing problems"};
  Flags f;
  app.add_option("--config", f.config, "Start from a saved config.json")->check(CLI::ExistingFile);
  app.add_option("--cmd", f.cmd, "gen | train | search | sweep | report")
      ->check(CLI::IsMember({"gen", "train", "search", "sweep", "report"}));
  app.add_option("--kind", f.kind, "tsp | cvrp")->check(CLI::IsMember({"tsp", "cvrp"}));
  app.add_option("--n", f.n, "Cities (tsp) or customers (cvrp)");
  app.add_option("--count", f.count, "Instances to generate");
  app.add_option("--instances", f.instances, "Instance file (JSON lines)");
  app.add_option("--checkpoint", f.checkpoint, "Model checkpoint");
  app.add_option("--strategy", f.strategy, "greedy | sampling | active-search | eas-emb | eas-lay | eas-tab");
  app.add_option("--iters", f.iters, "Search iterations");
  app.add_option("--augs", f.augs, "Augmentations (1..8)");
  app.add_option("--starts", f.starts, "Start nodes per instance (0 = all)");
  app.add_option("--lambda", f.lambda, "Imitation weight");
  app.add_option("--alpha", f.alpha, "Table steepness exponent");
  app.add_option("--sigma", f.sigma, "Table exploitation level");
  app.add_option("--lr", f.lr, "Search learning rate (0 = strategy default)");
  app.add_option("--copies", f.copies, "Search copies per instance");
  app.add_flag("--as-il", f.as_il, "Add the imitation term to active search");
  app.add_option("--seed", f.seed, "Master seed");
  app.add_option("--out", f.out, "Output file (gen) or directory");
  app.add_option("--steps", f.steps, "Training steps");
  app.add_option("--batch", f.batch, "Training instances per step");
  app.add_option("--train-lr", f.train_lr, "Training learning rate");
  app.add_option("--val-size", f.val_size, "Validation instances");
  app.add_option("--val-cadence", f.val_cadence, "Steps between validation records");
  app.add_option("--d", f.d, "Embedding width");
  app.add_option("--param", f.param, "Sweep parameter: lambda | sigma | alpha | lr");
  app.add_option("--values", f.values, "Sweep values")->delimiter(',');
  app.add_option("--inputs", f.inputs, "Search output directories to report on")->delimiter(',');
  app.add_option("--oracle", f.oracle, "auto | exact | reference | none")
      ->check(CLI::IsMember({"auto", "exact", "reference", "none"}));
  app.add_option("--timing", f.timing, "on | off (off writes 0 for wall-clock fields)")->check(CLI::IsMember({"on", "off"}));
  CLI11_PARSE(app, argc, argv);

  try {
    const ExperimentConfig c = assemble(app, f);
    if (c.command == "gen") {
      if (c.out.empty()) throw eas::Error("--out is required");
      eas::cmd_gen(c.kind, c.n, c.count, c.seed, c.out);
    } else if (c.command == "train") {
      eas::cmd_train(c, [](const eas::CurveRecord& r) {
        std::fprintf(stderr, "step %d  train %.4f  grad %.4f  val %.4f\n", r.step, r.mean_train_cost, r.grad_norm,
                     r.val_greedy_cost);
      });
    } else if (c.command == "search") {
      return eas::cmd_search(c) == 0 ? 0 : 1;
    } else if (c.command == "sweep") {
      eas::cmd_sweep(c);
    } else if (c.command == "report") {
      const eas::Report rep = eas::cmd_report(c);
      std::cout << eas::summary_csv(rep);
      if (rep.sampling_slope) std::cout << '\n' << eas::slope_csv(rep);
    } else {
      throw eas::Error("--cmd is required");
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
