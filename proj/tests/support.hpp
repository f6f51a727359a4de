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

#pragma once

#include <cstdint>
#include <vector>

#include "eas/model.hpp"

namespace eas::test_support {

inline PolicyModel small_model(ProblemKind kind, int d = 16, std::uint64_t seed = 1) {
  ModelConfig c;
  c.kind = kind;
  c.d = d;
  c.adapter_hidden = 8;
  return init_policy(c, seed);
}

/// Multi-start RL rows with mean-baseline weights plus one teacher-forced
/// incumbent row.
struct Surrogate {
  std::vector<Solution> sampled;
  Solution incumbent;
  std::vector<Real> weights;
  std::vector<RowSpec> rows;

  Surrogate(const PolicyModel& m, const Instance& inst, std::uint64_t seed) {
    Rng rng(seed);
    sampled = rollout(m, inst, DecodeMode::kSample, default_starts(inst, 3), std::vector<int>{0}, rng);
    incumbent = rollout(m, inst, DecodeMode::kGreedy, std::vector<int>{default_starts(inst)[1]}, std::vector<int>{0}, rng)[0];
    double mean = 0;
    for (const auto& s : sampled) mean += s.cost / static_cast<double>(sampled.size());
    for (const auto& s : sampled) {
      rows.push_back({s.actions.front(), &s.actions});
      weights.push_back(static_cast<Real>((s.cost - mean) / static_cast<double>(sampled.size())));
    }
    rows.push_back({incumbent.actions.front(), &incumbent.actions});
    weights.push_back(Real(-0.5));
  }

  Var loss(const DecoderVars& v, const Instance& inst) const {
    DecodeOptions opt;
    opt.track_log_prob = true;
    return weighted_log_prob(decode_batch(v, inst, rows, opt), weights);
  }
};

inline NamedParamSet random_adapter(const PolicyModel& m, std::uint64_t seed) {
  Rng rng(seed);
  NamedParamSet a = make_adapter(m.config.d, m.config.adapter_hidden, rng);
  a.set(names::kAdapterW2, uniform_tensor(a.get(names::kAdapterW2).shape(), rng));
  a.set(names::kAdapterB2, uniform_tensor(a.get(names::kAdapterB2).shape(), rng));
  return a;
}

}  // namespace eas::test_support
