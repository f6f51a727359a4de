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

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <span>

#include "eas/tensor.hpp"

namespace eas {

struct SignTest {
  int wins = 0;    // first sample strictly lower
  int losses = 0;  // first sample strictly higher
  int ties = 0;
  double p_value = 1;  // one-sided, H1: first tends lower
};

/// Paired one-sided sign test; ties are dropped.
inline SignTest sign_test(std::span<const double> first, std::span<const double> second) {
  if (first.size() != second.size()) throw Error("sign_test: samples differ in length");
  SignTest t;
  for (std::size_t i = 0; i < first.size(); ++i) {
    if (first[i] < second[i]) ++t.wins;
    else if (first[i] > second[i]) ++t.losses;
    else ++t.ties;
  }
  const int trials = t.wins + t.losses;
  if (trials == 0) return t;
  // P(X >= wins) for X ~ Binomial(trials, 1/2).
  const boost::math::binomial_distribution<double> dist(trials, 0.5);
  t.p_value = t.wins == 0 ? 1.0 : boost::math::cdf(boost::math::complement(dist, t.wins - 1));
  return t;
}

struct SlopeFit {
  double slope = 0;
  double intercept = 0;
  double std_error = 0;
  double ci_low = 0;
  double ci_high = 0;
};

/// Ordinary least squares y = a + b x with a two-sided Student-t interval
/// on b.
inline SlopeFit fit_slope(std::span<const double> x, std::span<const double> y, double confidence = 0.95) {
  const std::size_t m = x.size();
  if (m != y.size()) throw Error("fit_slope: length mismatch");
  if (m < 3) throw Error("fit_slope: need at least 3 points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += x[i] / static_cast<double>(m);
    my += y[i] / static_cast<double>(m);
  }
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0)) throw Error("fit_slope: x has no spread");
  SlopeFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rss = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    rss += r * r;
  }
  const double dof = static_cast<double>(m) - 2;
  f.std_error = std::sqrt(rss / dof / sxx);
  const boost::math::students_t_distribution<double> t(dof);
  const double q = boost::math::quantile(t, 0.5 + confidence / 2);
  f.ci_low = f.slope - q * f.std_error;
  f.ci_high = f.slope + q * f.std_error;
  return f;
}

}  // namespace eas
