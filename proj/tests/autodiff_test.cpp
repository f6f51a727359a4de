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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "eas/autodiff.hpp"
#include "eas/optim.hpp"

namespace eas {
namespace {

Tensor random_tensor(std::size_t r, std::size_t c, std::mt19937_64& rng, double lo = -1, double hi = 1) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<Real> v(r * c);
  for (Real& x : v) x = static_cast<Real>(u(rng));
  return Tensor({r, c}, v);
}

TEST(Forward, MaskedSoftmaxUniformOverFeasible) {
  Tape tape;
  Var x = tape.constant(Tensor::zeros(1, 5));
  Var p = masked_softmax(x, {1, 1, 1, 1, 0});
  const std::vector<Real> expected = {0.25, 0.25, 0.25, 0.25, 0};
  EXPECT_EQ(p.value().to_vector(), expected);
}

TEST(Forward, Relu) {
  Tape tape;
  Var y = relu(tape.constant(Tensor({1, 2}, {-1, 2})));
  EXPECT_EQ(y.value().to_vector(), (std::vector<Real>{0, 2}));
}

TEST(Forward, IdentityMatmul) {
  std::mt19937_64 rng(3);
  Tape tape;
  Tensor a = random_tensor(3, 3, rng);
  Var y = matmul(tape.constant(Tensor({3, 3}, {1, 0, 0, 0, 1, 0, 0, 0, 1})), tape.constant(a));
  EXPECT_EQ(y.value(), a);
}

TEST(Forward, ShapeMismatchRejected) {
  Tape tape;
  Var a = tape.constant(Tensor::zeros(2, 3));
  Var b = tape.constant(Tensor::zeros(2, 3));
  EXPECT_THROW(matmul(a, b), Error);
  EXPECT_THROW(add(a, tape.constant(Tensor::zeros(3, 3))), Error);
  EXPECT_THROW(masked_softmax(a, {1, 1}), Error);
}

TEST(Forward, LogOfNonpositiveRejected) {
  Tape tape;
  EXPECT_THROW(log(tape.constant(Tensor({1, 2}, {1, 0}))), Error);
  EXPECT_THROW(log(tape.constant(Tensor({1, 1}, {-2}))), Error);
}

TEST(Forward, FullyMaskedRowRejected) {
  Tape tape;
  EXPECT_THROW(masked_softmax(tape.constant(Tensor::zeros(1, 3)), {0, 0, 0}), Error);
}

TEST(Forward, DeterministicAndFinite) {
  std::mt19937_64 rng(11);
  Tensor a = random_tensor(6, 4, rng, -30, 30);
  auto run = [&] {
    Tape tape;
    Var x = tape.constant(a);
    return exp(scale(tanh(x), 2)).value();
  };
  Tensor first = run();
  EXPECT_EQ(first, run());
  for (Real v : first.values()) EXPECT_TRUE(std::isfinite(v));
}

TEST(Forward, MaskedSoftmaxProperties) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t rows = 1 + rng() % 6;
    const std::size_t cols = 1 + rng() % 12;
    Tensor x = random_tensor(rows, cols, rng, -50, 50);
    std::vector<std::uint8_t> mask(rows * cols);
    for (auto& m : mask) m = rng() % 3 != 0;
    for (std::size_t r = 0; r < rows; ++r) mask[r * cols + rng() % cols] = 1;
    Tape tape;
    Tensor p = masked_softmax(tape.constant(x), mask).value();
    for (std::size_t r = 0; r < rows; ++r) {
      double total = 0;
      for (std::size_t c = 0; c < cols; ++c) {
        const Real v = p.at(r, c);
        EXPECT_GE(v, 0);
        if (!mask[r * cols + c]) EXPECT_EQ(v, 0);
        total += v;
      }
      EXPECT_NEAR(total, 1.0, 1e-9);
    }
  }
}

TEST(Backprop, ReluSubgradient) {
  Tape tape;
  Var x = tape.leaf(Tensor({1, 2}, {-1, 2}), "x");
  Var y = relu(x);
  GradientMap g = tape.backprop(y, Tensor({1, 2}, {1, 1}), {"x"});
  EXPECT_EQ(g.at("x").to_vector(), (std::vector<Real>{0, 1}));
}

TEST(Backprop, LinearInWeights) {
  Tape tape;
  Tensor x({1, 3}, {0.5, -2, 3});
  Var w = tape.leaf(Tensor::filled(3, 4, 0.1), "W");
  Var f = sum(matmul(tape.constant(x), w));
  GradientMap g = tape.backprop(f, Tensor::scalar(1), {"W"});
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 4; ++c) EXPECT_EQ(g.at("W").at(r, c), x[r]);
}

TEST(Backprop, UnknownTargetRejected) {
  Tape tape;
  Var x = tape.leaf(Tensor::zeros(1, 1), "x");
  EXPECT_THROW(tape.backprop(x, Tensor::scalar(1), {"y"}), Error);
  EXPECT_THROW(tape.backprop(x, Tensor::zeros(1, 2), {"x"}), Error);
}

TEST(Backprop, RestrictingTargetsKeepsValues) {
  std::mt19937_64 rng(9);
  Tape tape;
  Var a = tape.leaf(random_tensor(4, 5, rng), "a");
  Var b = tape.leaf(random_tensor(5, 3, rng), "b");
  Var f = sum(tanh(matmul(a, b)));
  GradientMap only_a = tape.backprop(f, Tensor::scalar(1), {"a"});
  GradientMap both = tape.backprop(f, Tensor::scalar(1), {"a", "b"});
  EXPECT_EQ(only_a.size(), 1U);
  EXPECT_EQ(only_a.at("a"), both.at("a"));
}

// Three-layer composition checked against central differences.
TEST(GradCheck, ThreeLayerComposition) {
  std::mt19937_64 rng(21);
  NamedParamSet p;
  p.add("W1", random_tensor(3, 6, rng));
  p.add("b1", random_tensor(1, 6, rng));
  p.add("W2", random_tensor(6, 5, rng));
  p.add("W3", random_tensor(5, 4, rng));
  const Tensor x = random_tensor(2, 3, rng);
  auto fn = [&](Tape& t, const std::map<std::string, Var>& v) {
    Var h = tanh(add(matmul(t.constant(x), v.at("W1")), v.at("b1")));
    h = relu(matmul(h, v.at("W2")));
    Var out = masked_softmax(matmul(h, v.at("W3")), {1, 1, 0, 1, 1, 1, 1, 0});
    return sum(log(add(out, t.constant(Tensor::filled(2, 4, 0.5)))));
  };
  EXPECT_LE(grad_check(fn, p, 1e-5), 1e-6);
}

TEST(GradCheck, LinearFunctionIsExact) {
  std::mt19937_64 rng(2);
  NamedParamSet p;
  p.add("w", random_tensor(4, 1, rng));
  const Tensor x = random_tensor(1, 4, rng);
  auto fn = [&](Tape& t, const std::map<std::string, Var>& v) { return sum(scale(matmul(t.constant(x), v.at("w")), 3)); };
  EXPECT_LE(grad_check(fn, p, 1e-3), 1e-10);
}

TEST(GradCheck, ConstantFunctionHasZeroError) {
  NamedParamSet p;
  p.add("w", Tensor::filled(2, 2, 1));
  auto fn = [](Tape& t, const std::map<std::string, Var>&) { return t.constant(Tensor::scalar(4)); };
  EXPECT_EQ(grad_check(fn, p, 1e-5), 0);
}

TEST(GradCheck, RejectsNonFiniteAndBadStep) {
  NamedParamSet p;
  p.add("w", Tensor::filled(1, 1, 1000));
  auto fn = [](Tape&, const std::map<std::string, Var>& v) { return sum(exp(v.at("w"))); };
  EXPECT_THROW(grad_check(fn, p, 1e-5), Error);
  EXPECT_THROW(grad_check(fn, p, 0), Error);
}

// Every primitive on randomized shapes up to 32 x 32.
TEST(GradCheck, EveryPrimitiveRandomShapes) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 6; ++trial) {
    const std::size_t r = 1 + rng() % 32;
    const std::size_t k = 1 + rng() % 32;
    const std::size_t c = 1 + rng() % 32;
    NamedParamSet p;
    p.add("A", random_tensor(r, k, rng));
    p.add("B", random_tensor(k, c, rng));
    p.add("bias", random_tensor(1, c, rng));
    std::vector<int> gather(1 + rng() % 5);
    for (int& g : gather) g = static_cast<int>(rng() % r);
    std::vector<std::uint8_t> mask(gather.size() * c, 1);
    for (auto& m : mask) m = rng() % 4 != 0;
    for (std::size_t i = 0; i < gather.size(); ++i) mask[i * c] = 1;
    std::vector<int> pick(gather.size());
    for (std::size_t i = 0; i < pick.size(); ++i) pick[i] = 0;
    const Real weights_scale = Real(1) / static_cast<Real>(k);
    auto fn = [&](Tape& t, const std::map<std::string, Var>& v) {
      Var h = scale(matmul(v.at("A"), v.at("B")), weights_scale);
      h = add(h, v.at("bias"));
      Var g = gather_rows(h, gather);
      Var s = masked_softmax(g, mask);
      Var lp = log(select(s, pick));
      Var e = mean(exp(tanh(h)));
      Var m = mean_rows(relu(transpose(h)));
      return add(add(sum(lp), e), sum(m));
    };
    EXPECT_LE(grad_check(fn, p, 1e-5), 1e-4) << "trial " << trial;
  }
}

TEST(Adam, ZeroLearningRateLeavesParameters) {
  NamedParamSet p;
  p.add("w", Tensor({1, 2}, {1, -1}));
  const NamedParamSet before = p;
  Adam adam({0.0});
  adam.step(p, {{"w", Tensor({1, 2}, {0.3, 0.2})}});
  EXPECT_TRUE(p == before);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  NamedParamSet p;
  p.add("w", Tensor({1, 2}, {1, -1}));
  Adam adam({0.1});
  adam.step(p, {{"w", Tensor({1, 2}, {4, -0.5})}});
  EXPECT_NEAR(p.get("w")[0], 0.9, 1e-7);
  EXPECT_NEAR(p.get("w")[1], -0.9, 1e-6);
}

}  // namespace
}  // namespace eas
