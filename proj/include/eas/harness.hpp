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

// Experiment runner behind the command-line tool: instance generation,
// training, search benchmarking against oracles, sweeps and reports.

#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "eas/checkpoint.hpp"
#include "eas/instance_io.hpp"
#include "eas/oracles.hpp"
#include "eas/search.hpp"
#include "eas/stats.hpp"
#include "eas/training.hpp"

namespace eas {

struct ExperimentConfig {
  std::string command;
  ProblemKind kind = ProblemKind::kTsp;
  int n = 20;
  int count = 100;
  std::string instances;
  std::string checkpoint;
  std::string out;
  std::uint64_t seed = 1;
  SearchConfig search;
  TrainConfig train;
  std::string sweep_param;
  std::vector<double> sweep_values;
  std::vector<std::string> inputs;
  std::string oracle = "auto";  // auto | exact | reference | none
  bool timing = true;           // false writes 0 for every wall-clock field
};

inline nlohmann::ordered_json to_json(const SearchConfig& c) {
  nlohmann::ordered_json j;
  j["strategy"] = strategy_name(c.strategy);
  j["iterations"] = c.iterations;
  j["augmentations"] = c.augmentations;
  j["starts"] = c.starts;
  j["lambda"] = c.lambda;
  j["alpha"] = c.alpha;
  j["sigma"] = c.sigma;
  j["lr"] = c.lr;
  j["seed"] = c.seed;
  j["copies"] = c.copies;
  j["active_search_il"] = c.active_search_il;
  return j;
}

inline nlohmann::ordered_json to_json(const TrainConfig& c) {
  nlohmann::ordered_json j;
  j["kind"] = kind_name(c.kind);
  j["n"] = c.n;
  j["batch"] = c.batch;
  j["starts"] = c.starts;
  j["steps"] = c.steps;
  j["lr"] = c.adam.lr;
  j["beta1"] = c.adam.beta1;
  j["beta2"] = c.adam.beta2;
  j["eps"] = c.adam.eps;
  j["seed"] = c.seed;
  j["val_size"] = c.val_size;
  j["val_cadence"] = c.val_cadence;
  j["d"] = c.d;
  j["adapter_hidden"] = c.adapter_hidden;
  j["clip"] = c.clip;
  return j;
}

inline nlohmann::ordered_json to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["command"] = c.command;
  j["kind"] = kind_name(c.kind);
  j["n"] = c.n;
  j["count"] = c.count;
  j["instances"] = c.instances;
  j["checkpoint"] = c.checkpoint;
  j["out"] = c.out;
  j["seed"] = c.seed;
  j["search"] = to_json(c.search);
  j["train"] = to_json(c.train);
  j["sweep_param"] = c.sweep_param;
  j["sweep_values"] = c.sweep_values;
  j["inputs"] = c.inputs;
  j["oracle"] = c.oracle;
  j["timing"] = c.timing;
  return j;
}

template <typename T>
void read_field(const nlohmann::json& j, const char* key, T& into) {
  if (j.contains(key)) into = j.at(key).get<T>();
}

inline SearchConfig search_config_from_json(const nlohmann::json& j) {
  SearchConfig c;
  if (j.contains("strategy")) c.strategy = parse_strategy(j.at("strategy").get<std::string>());
  read_field(j, "iterations", c.iterations);
  read_field(j, "augmentations", c.augmentations);
  read_field(j, "starts", c.starts);
  read_field(j, "lambda", c.lambda);
  read_field(j, "alpha", c.alpha);
  read_field(j, "sigma", c.sigma);
  read_field(j, "lr", c.lr);
  read_field(j, "seed", c.seed);
  read_field(j, "copies", c.copies);
  read_field(j, "active_search_il", c.active_search_il);
  return c;
}

inline TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  if (j.contains("kind")) c.kind = parse_kind(j.at("kind").get<std::string>());
  read_field(j, "n", c.n);
  read_field(j, "batch", c.batch);
  read_field(j, "starts", c.starts);
  read_field(j, "steps", c.steps);
  read_field(j, "lr", c.adam.lr);
  read_field(j, "beta1", c.adam.beta1);
  read_field(j, "beta2", c.adam.beta2);
  read_field(j, "eps", c.adam.eps);
  read_field(j, "seed", c.seed);
  read_field(j, "val_size", c.val_size);
  read_field(j, "val_cadence", c.val_cadence);
  read_field(j, "d", c.d);
  read_field(j, "adapter_hidden", c.adapter_hidden);
  read_field(j, "clip", c.clip);
  return c;
}

inline ExperimentConfig experiment_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  try {
    read_field(j, "command", c.command);
    if (j.contains("kind")) c.kind = parse_kind(j.at("kind").get<std::string>());
    read_field(j, "n", c.n);
    read_field(j, "count", c.count);
    read_field(j, "instances", c.instances);
    read_field(j, "checkpoint", c.checkpoint);
    read_field(j, "out", c.out);
    read_field(j, "seed", c.seed);
    if (j.contains("search")) c.search = search_config_from_json(j.at("search"));
    if (j.contains("train")) c.train = train_config_from_json(j.at("train"));
    read_field(j, "sweep_param", c.sweep_param);
    read_field(j, "sweep_values", c.sweep_values);
    read_field(j, "inputs", c.inputs);
    read_field(j, "oracle", c.oracle);
    read_field(j, "timing", c.timing);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed experiment config: ") + e.what());
  }
  return c;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

inline ExperimentConfig load_experiment(const std::string& path) {
  const std::string text = read_text(path);
  try {
    return experiment_from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(path + ": " + e.what());
  }
}

/// Shortest text that parses back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

/// Creates the output directory and copies the config into it.
inline std::filesystem::path prepare_output(const ExperimentConfig& c) {
  if (c.out.empty()) throw Error("--out is required");
  std::filesystem::create_directories(c.out);
  write_text(std::filesystem::path(c.out) / "config.json", to_json(c).dump(2) + "\n");
  return c.out;
}

// gen

inline std::vector<Instance> generate_set(ProblemKind kind, int n, int count, std::uint64_t seed) {
  if (count < 0) throw Error("count must be non-negative");
  std::vector<Instance> out;
  for (int i = 0; i < count; ++i) out.push_back(generate_instance(kind, n, derive_seed(seed, static_cast<std::uint64_t>(i))));
  return out;
}

inline void cmd_gen(ProblemKind kind, int n, int count, std::uint64_t seed, const std::string& path) {
  write_instances(path, generate_set(kind, n, count, seed));
}

// results

enum class OracleSource { kNone, kExact, kReference };

inline const char* oracle_name(OracleSource s) {
  switch (s) {
    case OracleSource::kExact: return "exact";
    case OracleSource::kReference: return "reference";
    case OracleSource::kNone: return "none";
  }
  return "?";
}

inline OracleSource choose_oracle(const std::string& mode, std::span<const Instance> instances) {
  bool exact = true;
  for (const auto& inst : instances) exact = exact && exact_supported(inst);
  if (mode == "none") return OracleSource::kNone;
  if (mode == "reference") return OracleSource::kReference;
  if (mode == "exact") {
    if (!exact) throw Error("exact oracle requested but some instance exceeds the exact solver limit");
    return OracleSource::kExact;
  }
  if (mode == "auto") return exact ? OracleSource::kExact : OracleSource::kReference;
  throw Error("unknown oracle mode '" + mode + "'");
}

inline std::vector<double> oracle_costs(OracleSource src, std::span<const Instance> instances, int workers = worker_count()) {
  std::vector<double> out(instances.size(), 0);
  if (src == OracleSource::kNone) return out;
  parallel_for(
      instances.size(),
      [&](std::size_t i) {
        out[i] = src == OracleSource::kExact ? exact_optimum(instances[i]) : reference_heuristic(instances[i]);
      },
      workers);
  return out;
}

struct ResultRow {
  int instance_id = 0;
  std::string strategy;
  double best_cost = 0;
  std::optional<double> oracle_cost;
  std::optional<double> gap_percent;
  long long solutions_sampled = 0;
  double wall_ms = 0;
};

struct ResultTable {
  OracleSource oracle = OracleSource::kNone;
  std::vector<ResultRow> rows;
};

inline double gap_percent(double best, double oracle) { return 100.0 * (best - oracle) / oracle; }

/// The oracle column is named after its source, e.g. oracle_cost_exact.
inline std::string results_csv(const ResultTable& t) {
  std::ostringstream os;
  os << "instance_id,strategy,best_cost";
  if (t.oracle != OracleSource::kNone) os << ",oracle_cost_" << oracle_name(t.oracle) << ",gap_percent";
  os << ",solutions_sampled,wall_ms\n";
  for (const auto& r : t.rows) {
    os << r.instance_id << ',' << r.strategy << ',' << format_double(r.best_cost);
    if (t.oracle != OracleSource::kNone) os << ',' << format_double(*r.oracle_cost) << ',' << format_double(*r.gap_percent);
    os << ',' << r.solutions_sampled << ',' << format_double(r.wall_ms) << '\n';
  }
  return os.str();
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline double parse_number(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(where + ": '" + s + "' is not a number");
  }
}

inline ResultTable parse_results_csv(const std::string& text, const std::string& name) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error(name + ":1: missing header");
  const auto header = split_csv_line(line);
  ResultTable t;
  std::size_t expected = 0;
  const bool base = header.size() >= 3 && header[0] == "instance_id" && header[1] == "strategy" && header[2] == "best_cost";
  if (base && header.size() == 5 && header[3] == "solutions_sampled" && header[4] == "wall_ms") {
    expected = 5;
  } else if (base && header.size() == 7 && header[4] == "gap_percent" && header[5] == "solutions_sampled" &&
             header[6] == "wall_ms") {
    if (header[3] == "oracle_cost_exact") t.oracle = OracleSource::kExact;
    else if (header[3] == "oracle_cost_reference") t.oracle = OracleSource::kReference;
    else throw Error(name + ":1: unknown oracle column '" + header[3] + "'");
    expected = 7;
  } else {
    throw Error(name + ":1: unexpected header");
  }
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    const std::string where = name + ":" + std::to_string(number);
    const auto cells = split_csv_line(line);
    if (cells.size() != expected)
      throw Error(where + ": expected " + std::to_string(expected) + " fields, got " + std::to_string(cells.size()));
    ResultRow r;
    r.instance_id = static_cast<int>(parse_number(cells[0], where));
    r.strategy = cells[1];
    try {
      parse_strategy(r.strategy);
    } catch (const Error& e) {
      throw Error(where + ": " + e.what());
    }
    r.best_cost = parse_number(cells[2], where);
    std::size_t k = 3;
    if (expected == 7) {
      r.oracle_cost = parse_number(cells[3], where);
      r.gap_percent = parse_number(cells[4], where);
      k = 5;
    }
    r.solutions_sampled = static_cast<long long>(parse_number(cells[k], where));
    r.wall_ms = parse_number(cells[k + 1], where);
    t.rows.push_back(std::move(r));
  }
  return t;
}

struct TrajectoryRecord {
  std::string strategy;
  IterationRecord rec;
};

inline std::string trajectory_line(const std::string& strategy, const IterationRecord& r) {
  nlohmann::ordered_json j;
  j["instance_id"] = r.instance_id;
  j["strategy"] = strategy;
  j["iteration"] = r.iteration;
  j["mean_sampled_cost"] = r.mean_sampled_cost;
  j["best_sampled_cost"] = r.best_sampled_cost;
  j["incumbent_cost"] = r.incumbent_cost;
  j["wall_ms"] = r.wall_ms;
  return j.dump();
}

inline std::vector<TrajectoryRecord> parse_trajectory(const std::string& text, const std::string& name) {
  std::vector<TrajectoryRecord> out;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    const std::string where = name + ":" + std::to_string(number);
    try {
      const auto j = nlohmann::json::parse(line);
      TrajectoryRecord t;
      t.strategy = j.at("strategy").get<std::string>();
      parse_strategy(t.strategy);
      t.rec.instance_id = j.at("instance_id").get<int>();
      t.rec.iteration = j.at("iteration").get<int>();
      t.rec.mean_sampled_cost = j.at("mean_sampled_cost").get<double>();
      t.rec.best_sampled_cost = j.at("best_sampled_cost").get<double>();
      t.rec.incumbent_cost = j.at("incumbent_cost").get<double>();
      t.rec.wall_ms = j.at("wall_ms").get<double>();
      if (t.rec.iteration < 1) throw Error("iteration must be positive");
      out.push_back(std::move(t));
    } catch (const nlohmann::json::exception& e) {
      throw Error(where + ": malformed trajectory record: " + e.what());
    } catch (const Error& e) {
      throw Error(where + ": " + e.what());
    }
  }
  return out;
}

inline std::string solution_line(int instance_id, const Solution& s) {
  nlohmann::ordered_json j;
  j["instance_id"] = instance_id;
  j["cost"] = s.cost;
  j["actions"] = s.actions;
  return j.dump();
}

// search

struct SearchRun {
  ResultTable table;
  std::vector<InstanceResult> results;  // failed instances keep an empty trajectory
  std::vector<std::string> failures;
};

/// Searches every instance, collecting per-instance failures instead of
/// aborting, and scores the best solutions against the oracle.
inline SearchRun benchmark(const PolicyModel& model, std::span<const Instance> instances, const SearchConfig& search,
                           OracleSource oracle, bool timing, int workers = worker_count(),
                           const WarningSink& warn = warn_stderr) {
  validate(search);
  for (std::size_t i = 0; i < instances.size(); ++i)
    if (instances[i].kind != model.config.kind)
      throw Error("instance " + std::to_string(i) + " is " + kind_name(instances[i].kind) + " but the checkpoint is " +
                  kind_name(model.config.kind));
  SearchRun run;
  run.table.oracle = oracle;
  run.results.resize(instances.size());
  std::vector<std::string> errors(instances.size());
  const SearchContext ctx{model, search, warn};
  parallel_for(
      instances.size(),
      [&](std::size_t i) {
        try {
          run.results[i] = search_instance(ctx, instances[i], static_cast<int>(i));
        } catch (const std::exception& e) {
          run.results[i].instance_id = static_cast<int>(i);
          errors[i] = "instance " + std::to_string(i) + ": " + e.what();
        }
      },
      workers);
  const auto oracle_values = oracle_costs(oracle, instances, workers);
  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (!errors[i].empty()) {
      run.failures.push_back(errors[i]);
      continue;
    }
    auto& res = run.results[i];
    if (!timing) {
      res.wall_ms = 0;
      for (auto& r : res.trajectory) r.wall_ms = 0;
    }
    ResultRow row;
    row.instance_id = static_cast<int>(i);
    row.strategy = strategy_name(search.strategy);
    row.best_cost = res.best.cost;
    if (oracle != OracleSource::kNone) {
      row.oracle_cost = oracle_values[i];
      row.gap_percent = gap_percent(res.best.cost, oracle_values[i]);
    }
    row.solutions_sampled = res.solutions_sampled;
    row.wall_ms = res.wall_ms;
    run.table.rows.push_back(std::move(row));
  }
  return run;
}

inline void write_search_outputs(const std::filesystem::path& dir, const SearchRun& run, const SearchConfig& search) {
  write_text(dir / "results.csv", results_csv(run.table));
  std::string traj, sols;
  for (const auto& r : run.results) {
    for (const auto& rec : r.trajectory) traj += trajectory_line(strategy_name(search.strategy), rec) + "\n";
    if (!r.trajectory.empty()) sols += solution_line(r.instance_id, r.best) + "\n";
  }
  write_text(dir / "trajectory.jsonl", traj);
  write_text(dir / "solutions.jsonl", sols);
}

inline std::vector<Instance> load_instances_for(const ExperimentConfig& c) {
  if (c.instances.empty()) throw Error("--instances is required");
  return read_instances(c.instances);
}

inline PolicyModel load_model_for(const ExperimentConfig& c, std::span<const Instance> instances) {
  if (c.checkpoint.empty()) throw Error("--checkpoint is required");
  PolicyModel model = load_checkpoint(c.checkpoint);
  for (std::size_t i = 0; i < instances.size(); ++i)
    if (instances[i].kind != model.config.kind)
      throw Error("instance " + std::to_string(i) + " is " + kind_name(instances[i].kind) + " but checkpoint '" +
                  c.checkpoint + "' is " + kind_name(model.config.kind));
  return model;
}

/// Returns the number of failed instances.
inline int cmd_search(const ExperimentConfig& c, int workers = worker_count()) {
  const auto instances = load_instances_for(c);
  const PolicyModel model = load_model_for(c, instances);
  validate(c.search);
  const OracleSource oracle = choose_oracle(c.oracle, instances);
  const auto dir = prepare_output(c);
  const SearchRun run = benchmark(model, instances, c.search, oracle, c.timing, workers);
  write_search_outputs(dir, run, c.search);
  for (const auto& f : run.failures) std::cerr << "error: " << f << '\n';
  return static_cast<int>(run.failures.size());
}

// train

inline void cmd_train(const ExperimentConfig& c, const TrainProgress& progress = {}, int workers = worker_count()) {
  validate(c.train);
  const auto dir = prepare_output(c);
  const TrainResult r = train(c.train, progress, workers);
  save_checkpoint(r.model, (dir / "checkpoint.bin").string());
  std::ostringstream curve;
  write_curve_csv(curve, r.curve);
  write_text(dir / "learning_curve.csv", curve.str());
}

// sweep

inline SearchConfig with_parameter(SearchConfig s, const std::string& param, double value) {
  const Strategy st = s.strategy;
  if (param == "lambda") {
    if (!(st == Strategy::kEasEmb || st == Strategy::kEasLay || (st == Strategy::kActiveSearch && s.active_search_il)))
      throw Error("lambda does not apply to strategy " + std::string(strategy_name(st)));
    s.lambda = value;
  } else if (param == "sigma" || param == "alpha") {
    if (st != Strategy::kEasTab) throw Error(param + " applies only to eas-tab");
    (param == "sigma" ? s.sigma : s.alpha) = value;
  } else if (param == "lr") {
    if (!is_gradient_strategy(st)) throw Error("lr does not apply to strategy " + std::string(strategy_name(st)));
    s.lr = value;
  } else {
    throw Error("unknown sweep parameter '" + param + "' (expected lambda, sigma, alpha or lr)");
  }
  validate(s);
  return s;
}

struct SweepRow {
  std::string parameter;
  double value = 0;
  std::string strategy;
  double mean_best_cost = 0;
  std::optional<double> mean_gap_percent;
  int instances = 0;
};

inline std::vector<SweepRow> sweep(const PolicyModel& model, std::span<const Instance> instances, const SearchConfig& base,
                                   const std::string& param, std::span<const double> values, OracleSource oracle,
                                   int workers = worker_count()) {
  if (values.empty()) throw Error("sweep: empty value list");
  std::vector<SearchConfig> configs;
  for (double v : values) configs.push_back(with_parameter(base, param, v));
  std::vector<SweepRow> rows;
  for (std::size_t k = 0; k < configs.size(); ++k) {
    const SearchRun run = benchmark(model, instances, configs[k], oracle, false, workers);
    if (!run.failures.empty()) throw Error("sweep: " + run.failures.front());
    SweepRow row{param, values[k], strategy_name(base.strategy), 0, {}, static_cast<int>(run.table.rows.size())};
    double gap = 0;
    for (const auto& r : run.table.rows) {
      row.mean_best_cost += r.best_cost / static_cast<double>(row.instances);
      if (r.gap_percent) gap += *r.gap_percent / static_cast<double>(row.instances);
    }
    if (oracle != OracleSource::kNone) row.mean_gap_percent = gap;
    rows.push_back(row);
  }
  return rows;
}

inline std::string sweep_csv(std::span<const SweepRow> rows) {
  std::ostringstream os;
  os << "parameter,value,strategy,mean_best_cost,mean_gap_percent,instances\n";
  for (const auto& r : rows)
    os << r.parameter << ',' << format_double(r.value) << ',' << r.strategy << ',' << format_double(r.mean_best_cost) << ','
       << (r.mean_gap_percent ? format_double(*r.mean_gap_percent) : "") << ',' << r.instances << '\n';
  return os.str();
}

inline void cmd_sweep(const ExperimentConfig& c, int workers = worker_count()) {
  if (c.sweep_values.empty()) throw Error("sweep: empty value list");
  for (double v : c.sweep_values) with_parameter(c.search, c.sweep_param, v);
  const auto instances = load_instances_for(c);
  const PolicyModel model = load_model_for(c, instances);
  const OracleSource oracle = choose_oracle(c.oracle, instances);
  const auto dir = prepare_output(c);
  write_text(dir / "sweep.csv", sweep_csv(sweep(model, instances, c.search, c.sweep_param, c.sweep_values, oracle, workers)));
}

// report

struct StrategySummary {
  std::string strategy;
  int instances = 0;
  double mean_cost = 0;
  std::optional<double> mean_gap_percent;
  double total_wall_ms = 0;
};

struct SeriesPoint {
  std::string strategy;
  int iteration = 0;
  double mean_sampled_cost = 0;
  double mean_incumbent_cost = 0;
  int instances = 0;
};

struct Report {
  std::vector<StrategySummary> summaries;
  std::vector<SeriesPoint> series;
  std::optional<SlopeFit> sampling_slope;
};

inline Report build_report(std::span<const ResultTable> tables, std::span<const TrajectoryRecord> trajectory) {
  Report rep;
  std::map<std::string, StrategySummary> by;
  std::map<std::string, std::pair<double, int>> gaps;
  for (const auto& t : tables)
    for (const auto& r : t.rows) {
      auto& s = by[r.strategy];
      s.strategy = r.strategy;
      ++s.instances;
      s.mean_cost += r.best_cost;
      s.total_wall_ms += r.wall_ms;
      if (r.gap_percent) {
        gaps[r.strategy].first += *r.gap_percent;
        ++gaps[r.strategy].second;
      }
    }
  for (auto& [name, s] : by) {
    s.mean_cost /= s.instances;
    if (gaps[name].second > 0) s.mean_gap_percent = gaps[name].first / gaps[name].second;
    rep.summaries.push_back(s);
  }
  std::map<std::pair<std::string, int>, SeriesPoint> points;
  for (const auto& t : trajectory) {
    auto& p = points[{t.strategy, t.rec.iteration}];
    p.strategy = t.strategy;
    p.iteration = t.rec.iteration;
    p.mean_sampled_cost += t.rec.mean_sampled_cost;
    p.mean_incumbent_cost += t.rec.incumbent_cost;
    ++p.instances;
  }
  std::vector<double> xs, ys;
  for (auto& [key, p] : points) {
    p.mean_sampled_cost /= p.instances;
    p.mean_incumbent_cost /= p.instances;
    rep.series.push_back(p);
    if (p.strategy == strategy_name(Strategy::kSampling)) {
      xs.push_back(p.iteration);
      ys.push_back(p.mean_sampled_cost);
    }
  }
  if (xs.size() >= 3) rep.sampling_slope = fit_slope(xs, ys);
  return rep;
}

inline std::string summary_csv(const Report& rep) {
  std::ostringstream os;
  os << "strategy,instances,mean_cost,mean_gap_percent,total_wall_ms\n";
  for (const auto& s : rep.summaries)
    os << s.strategy << ',' << s.instances << ',' << format_double(s.mean_cost) << ','
       << (s.mean_gap_percent ? format_double(*s.mean_gap_percent) : "") << ',' << format_double(s.total_wall_ms) << '\n';
  return os.str();
}

inline std::string slope_csv(const Report& rep) {
  std::ostringstream os;
  os << "strategy,slope,std_error,ci95_low,ci95_high,contains_zero\n";
  if (rep.sampling_slope) {
    const auto& f = *rep.sampling_slope;
    os << "sampling," << format_double(f.slope) << ',' << format_double(f.std_error) << ',' << format_double(f.ci_low)
       << ',' << format_double(f.ci_high) << ',' << (f.ci_low <= 0 && 0 <= f.ci_high ? "yes" : "no") << '\n';
  }
  return os.str();
}

inline std::string series_csv(const Report& rep) {
  std::ostringstream os;
  os << "strategy,iteration,mean_sampled_cost,mean_incumbent_cost,instances\n";
  for (const auto& p : rep.series)
    os << p.strategy << ',' << p.iteration << ',' << format_double(p.mean_sampled_cost) << ','
       << format_double(p.mean_incumbent_cost) << ',' << p.instances << '\n';
  return os.str();
}

/// Each input is a search output directory holding results.csv and
/// trajectory.jsonl.
inline Report cmd_report(const ExperimentConfig& c) {
  if (c.inputs.empty()) throw Error("report: no input directories");
  std::vector<ResultTable> tables;
  std::vector<TrajectoryRecord> traj;
  for (const auto& in : c.inputs) {
    const std::filesystem::path dir(in);
    tables.push_back(parse_results_csv(read_text(dir / "results.csv"), (dir / "results.csv").string()));
    auto t = parse_trajectory(read_text(dir / "trajectory.jsonl"), (dir / "trajectory.jsonl").string());
    traj.insert(traj.end(), t.begin(), t.end());
  }
  const Report rep = build_report(tables, traj);
  const auto dir = prepare_output(c);
  write_text(dir / "summary.csv", summary_csv(rep));
  write_text(dir / "series.csv", series_csv(rep));
  write_text(dir / "slope.csv", slope_csv(rep));
  return rep;
}

}  // namespace eas
