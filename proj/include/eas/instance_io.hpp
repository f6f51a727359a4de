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

// Instance files hold one JSON object per line:
//   {"kind":"tsp","n":5,"coords":[[x,y],...],"seed":7}
//   {"kind":"cvrp","n":2,"coords":[[x,y],...],"demands":[0,3,4],"capacity":30,"seed":7}
// Doubles are written in shortest round-trip form, so parse(serialize(i)) == i.

#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "eas/problems.hpp"

namespace eas {

inline nlohmann::json instance_to_json(const Instance& inst) {
  nlohmann::json j;
  j["kind"] = kind_name(inst.kind);
  j["n"] = inst.n;
  nlohmann::json coords = nlohmann::json::array();
  for (const Point& p : inst.coords) coords.push_back({p.x, p.y});
  j["coords"] = std::move(coords);
  if (inst.kind == ProblemKind::kCvrp) {
    j["demands"] = inst.demands;
    j["capacity"] = inst.capacity;
  }
  j["seed"] = inst.seed;
  return j;
}

inline Instance instance_from_json(const nlohmann::json& j) {
  Instance inst;
  try {
    inst.kind = parse_kind(j.at("kind").get<std::string>());
    inst.n = j.at("n").get<int>();
    for (const auto& c : j.at("coords")) {
      if (!c.is_array() || c.size() != 2) throw Error("coordinate entries must be [x, y] pairs");
      inst.coords.push_back({c[0].get<double>(), c[1].get<double>()});
    }
    if (j.contains("demands")) inst.demands = j.at("demands").get<std::vector<int>>();
    if (j.contains("capacity")) inst.capacity = j.at("capacity").get<int>();
    if (j.contains("seed")) inst.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed instance record: ") + e.what());
  }
  validate(inst);
  return inst;
}

inline std::string serialize_instance(const Instance& inst) { return instance_to_json(inst).dump(); }

inline Instance parse_instance(const std::string& line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("instance line is not valid JSON: ") + e.what());
  }
  return instance_from_json(j);
}

inline void write_instances(const std::string& path, const std::vector<Instance>& instances) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  for (const Instance& inst : instances) out << serialize_instance(inst) << '\n';
  if (!out) throw Error("write to '" + path + "' failed");
}

inline std::vector<Instance> read_instances(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open instance file '" + path + "'");
  std::vector<Instance> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    try {
      out.push_back(parse_instance(line));
    } catch (const Error& e) {
      throw Error(path + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace eas
