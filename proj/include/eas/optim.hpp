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

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "eas/autodiff.hpp"

namespace eas {

struct AdamOptions {
  Real lr = Real(1e-3);
  Real beta1 = Real(0.9);
  Real beta2 = Real(0.999);
  Real eps = Real(1e-8);
};

/// Adaptive moment estimation with bias correction. Moments are created
/// lazily per parameter name and keep that parameter's shape.
class Adam {
 public:
  explicit Adam(AdamOptions options = {}) : options_(options) {}

  const AdamOptions& options() const { return options_; }
  int steps() const { return steps_; }

  void step(NamedParamSet& params, const GradientMap& grads) {
    ++steps_;
    const Real c1 = Real(1) - std::pow(options_.beta1, static_cast<Real>(steps_));
    const Real c2 = Real(1) - std::pow(options_.beta2, static_cast<Real>(steps_));
    for (const auto& [name, grad] : grads) {
      const Tensor& current = params.get(name);
      if (grad.size() != current.size()) throw Error("adam: gradient shape mismatch for '" + name + "'");
      Moments& mo = moments_[name];
      if (mo.m.empty()) {
        mo.m.assign(current.size(), Real(0));
        mo.v.assign(current.size(), Real(0));
      }
      std::vector<Real> next = current.to_vector();
      for (std::size_t i = 0; i < next.size(); ++i) {
        const Real g = grad[i];
        mo.m[i] = options_.beta1 * mo.m[i] + (1 - options_.beta1) * g;
        mo.v[i] = options_.beta2 * mo.v[i] + (1 - options_.beta2) * g * g;
        const Real mhat = mo.m[i] / c1;
        const Real vhat = mo.v[i] / c2;
        next[i] -= options_.lr * mhat / (std::sqrt(vhat) + options_.eps);
      }
      params.set(name, Tensor(current.shape(), std::move(next)));
    }
  }

 private:
  struct Moments {
    std::vector<Real> m;
    std::vector<Real> v;
  };

  AdamOptions options_;
  int steps_ = 0;
  std::map<std::string, Moments> moments_;
};

inline bool all_finite(const GradientMap& grads) {
  for (const auto& [name, g] : grads)
    for (Real v : g.values())
      if (!std::isfinite(v)) return false;
  return true;
}

inline Real global_norm(const GradientMap& grads) {
  Real total = 0;
  for (const auto& [name, g] : grads)
    for (Real v : g.values()) total += v * v;
  return std::sqrt(total);
}

/// Applies one optimizer step unless some gradient entry is NaN or infinite.
inline bool apply_if_finite(NamedParamSet& params, Adam& adam, const GradientMap& grads) {
  if (!all_finite(grads)) return false;
  adam.step(params, grads);
  return true;
}

/// Elementwise sum of two gradient maps over the union of their names.
inline void accumulate(GradientMap& into, const GradientMap& more) {
  for (const auto& [name, g] : more) {
    auto it = into.find(name);
    if (it == into.end()) {
      into.emplace(name, g);
      continue;
    }
    std::vector<Real> sum = it->second.to_vector();
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += g[i];
    it->second = Tensor(g.shape(), std::move(sum));
  }
}

}  // namespace eas
