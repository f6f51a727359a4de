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

// Minimal reverse-mode differentiation over rank-2 tensors.
//
// A Tape records every primitive applied to it in execution order, so the
// record is topologically sorted by construction. Leaves are either named
// (candidate gradient targets) or anonymous constants. backprop() only
// walks entries that lie on a path from a requested target to the output;
// everything else is never differentiated.

#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "eas/tensor.hpp"

namespace eas {

enum class Op : std::uint8_t {
  kLeaf,
  kMatMul,
  kTranspose,
  kAdd,  // same shape, or row-vector bias broadcast over rows
  kRelu,
  kTanh,
  kScale,
  kLog,
  kExp,
  kGatherRows,
  kSelect,  // picks one column per row: out[r] = x[r, index[r]]
  kMaskedSoftmax,
  kSum,
  kMean,
  kMeanRows,  // column means, rows -> 1
};

inline const char* op_name(Op op) {
  switch (op) {
    case Op::kLeaf: return "leaf";
    case Op::kMatMul: return "matmul";
    case Op::kTranspose: return "transpose";
    case Op::kAdd: return "add";
    case Op::kRelu: return "relu";
    case Op::kTanh: return "tanh";
    case Op::kScale: return "scale";
    case Op::kLog: return "log";
    case Op::kExp: return "exp";
    case Op::kGatherRows: return "gather-rows";
    case Op::kSelect: return "select";
    case Op::kMaskedSoftmax: return "masked-softmax";
    case Op::kSum: return "sum";
    case Op::kMean: return "mean";
    case Op::kMeanRows: return "mean-rows";
  }
  return "?";
}

using GradientMap = std::map<std::string, Tensor>;

/// Ordered name -> tensor collection with a trainable flag per entry.
class NamedParamSet {
 public:
  struct Entry {
    std::string name;
    Tensor value;
    bool trainable = true;
  };

  void add(std::string name, Tensor value, bool trainable = true) {
    if (index_.count(name)) throw Error("duplicate parameter name '" + name + "'");
    index_.emplace(name, entries_.size());
    entries_.push_back({std::move(name), std::move(value), trainable});
  }

  bool contains(const std::string& name) const { return index_.count(name) != 0; }

  const Tensor& get(const std::string& name) const { return entries_[position(name)].value; }

  /// Replaces a value; the shape must not change.
  void set(const std::string& name, Tensor value) {
    Entry& e = entries_[position(name)];
    if (e.value.shape() != value.shape())
      throw Error("shape change for '" + name + "': " + shape_str(e.value.shape()) + " -> " +
                  shape_str(value.shape()));
    e.value = std::move(value);
  }

  void set_trainable(const std::string& name, bool trainable) {
    entries_[position(name)].trainable = trainable;
  }

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  std::vector<std::string> trainable_names() const {
    std::vector<std::string> out;
    for (const auto& e : entries_)
      if (e.trainable) out.push_back(e.name);
    return out;
  }

  friend bool operator==(const NamedParamSet& a, const NamedParamSet& b) {
    if (a.entries_.size() != b.entries_.size()) return false;
    for (std::size_t i = 0; i < a.entries_.size(); ++i) {
      const Entry& x = a.entries_[i];
      const Entry& y = b.entries_[i];
      if (x.name != y.name || x.trainable != y.trainable || !(x.value == y.value)) return false;
    }
    return true;
  }

 private:
  std::size_t position(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw Error("unknown parameter '" + name + "'");
    return it->second;
  }

  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

class Tape;

/// Handle to one entry on a tape.
struct Var {
  Tape* tape = nullptr;
  int id = -1;

  const Tensor& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
};

/// The computation record. Confined to one thread; leaf tensors it holds
/// may be shared read-only with other tapes.
class Tape {
 public:
  struct Entry {
    Op op = Op::kLeaf;
    int a = -1;
    int b = -1;
    Tensor value;
    Real factor = 0;                  // kScale
    std::vector<int> index;           // kGatherRows, kSelect
    std::vector<std::uint8_t> mask;   // kMaskedSoftmax
    std::string name;                 // named leaves only
  };

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var leaf(Tensor value, std::string name) {
    if (name.empty()) throw Error("named leaf requires a non-empty name");
    if (leaves_.count(name)) throw Error("leaf '" + name + "' already on tape");
    leaves_.emplace(name, static_cast<int>(entries_.size()));
    Entry e;
    e.value = std::move(value);
    e.name = std::move(name);
    return push(std::move(e));
  }

  Var constant(Tensor value) {
    Entry e;
    e.value = std::move(value);
    return push(std::move(e));
  }

  Var push(Entry e) {
    entries_.push_back(std::move(e));
    return Var{this, static_cast<int>(entries_.size()) - 1};
  }

  const Entry& entry(int id) const { return entries_.at(static_cast<std::size_t>(id)); }
  const Tensor& value(int id) const { return entries_[static_cast<std::size_t>(id)].value; }
  std::size_t size() const { return entries_.size(); }
  bool has_leaf(const std::string& name) const { return leaves_.count(name) != 0; }

  /// Reverse sweep from `output` seeded with `seed`. Only the named leaves in
  /// `targets` receive gradients, and only entries that depend on one of them
  /// are differentiated.
  GradientMap backprop(Var output, const Tensor& seed, const std::vector<std::string>& targets) const;

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, int> leaves_;
};

inline const Tensor& Var::value() const { return tape->value(id); }

namespace detail {

using RowMat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMat>;
using MutMap = Eigen::Map<RowMat>;

inline ConstMap as_matrix(const Tensor& t) {
  return ConstMap(t.data(), static_cast<Eigen::Index>(t.rows()), static_cast<Eigen::Index>(t.cols()));
}

inline Tape& same_tape(Var a, Var b) {
  if (a.tape == nullptr || a.tape != b.tape) throw Error("operands live on different tapes");
  return *a.tape;
}

inline Tensor make(std::size_t rows, std::size_t cols, std::vector<Real> data) {
  return Tensor({rows, cols}, std::move(data));
}

inline void shape_check(bool ok, const char* op, const Tensor& a, const Tensor* b = nullptr) {
  if (ok) return;
  std::string msg = std::string(op) + ": incompatible shape " + shape_str(a.shape());
  if (b) msg += " and " + shape_str(b->shape());
  throw Error(msg);
}

inline Var unary(Var x, Op op, std::vector<Real> out) {
  Tape::Entry e;
  e.op = op;
  e.a = x.id;
  e.value = make(x.rows(), x.cols(), std::move(out));
  return x.tape->push(std::move(e));
}

}  // namespace detail

inline Var matmul(Var a, Var b) {
  Tape& tape = detail::same_tape(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  detail::shape_check(av.cols() == bv.rows(), "matmul", av, &bv);
  std::vector<Real> out(av.rows() * bv.cols());
  detail::MutMap(out.data(), static_cast<Eigen::Index>(av.rows()), static_cast<Eigen::Index>(bv.cols())).noalias() =
      detail::as_matrix(av) * detail::as_matrix(bv);
  Tape::Entry e;
  e.op = Op::kMatMul;
  e.a = a.id;
  e.b = b.id;
  e.value = detail::make(av.rows(), bv.cols(), std::move(out));
  return tape.push(std::move(e));
}

inline Var transpose(Var x) {
  const Tensor& xv = x.value();
  std::vector<Real> out(xv.size());
  detail::MutMap(out.data(), static_cast<Eigen::Index>(xv.cols()), static_cast<Eigen::Index>(xv.rows())) =
      detail::as_matrix(xv).transpose();
  Tape::Entry e;
  e.op = Op::kTranspose;
  e.a = x.id;
  e.value = detail::make(xv.cols(), xv.rows(), std::move(out));
  return x.tape->push(std::move(e));
}

/// a + b where b has a's shape or is a single row broadcast over a's rows.
inline Var add(Var a, Var b) {
  Tape& tape = detail::same_tape(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  const bool same = av.rows() == bv.rows() && av.cols() == bv.cols();
  const bool bias = bv.rows() == 1 && bv.cols() == av.cols();
  detail::shape_check(same || bias, "add", av, &bv);
  std::vector<Real> out(av.values().begin(), av.values().end());
  const std::size_t cols = av.cols();
  if (same) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  } else {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i % cols];
  }
  Tape::Entry e;
  e.op = Op::kAdd;
  e.a = a.id;
  e.b = b.id;
  e.value = detail::make(av.rows(), cols, std::move(out));
  return tape.push(std::move(e));
}

inline Var relu(Var x) {
  std::vector<Real> out(x.value().values().begin(), x.value().values().end());
  for (Real& v : out) v = v > 0 ? v : Real(0);
  return detail::unary(x, Op::kRelu, std::move(out));
}

inline Var tanh(Var x) {
  std::vector<Real> out(x.value().values().begin(), x.value().values().end());
  for (Real& v : out) v = std::tanh(v);
  return detail::unary(x, Op::kTanh, std::move(out));
}

inline Var scale(Var x, Real factor) {
  std::vector<Real> out(x.value().values().begin(), x.value().values().end());
  for (Real& v : out) v *= factor;
  Tape::Entry e;
  e.op = Op::kScale;
  e.a = x.id;
  e.factor = factor;
  e.value = detail::make(x.rows(), x.cols(), std::move(out));
  return x.tape->push(std::move(e));
}

inline Var log(Var x) {
  std::vector<Real> out(x.value().values().begin(), x.value().values().end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!(out[i] > 0))
      throw Error("log of nonpositive value " + std::to_string(out[i]) + " at flat index " + std::to_string(i));
    out[i] = std::log(out[i]);
  }
  return detail::unary(x, Op::kLog, std::move(out));
}

inline Var exp(Var x) {
  std::vector<Real> out(x.value().values().begin(), x.value().values().end());
  for (Real& v : out) v = std::exp(v);
  return detail::unary(x, Op::kExp, std::move(out));
}

/// out[r] = x[index[r]]
inline Var gather_rows(Var x, std::vector<int> index) {
  const Tensor& xv = x.value();
  const std::size_t cols = xv.cols();
  std::vector<Real> out(index.size() * cols);
  for (std::size_t r = 0; r < index.size(); ++r) {
    if (index[r] < 0 || static_cast<std::size_t>(index[r]) >= xv.rows())
      throw Error("gather-rows: index " + std::to_string(index[r]) + " out of range for " + shape_str(xv.shape()));
    std::copy_n(xv.data() + static_cast<std::size_t>(index[r]) * cols, cols, out.data() + r * cols);
  }
  if (index.empty()) throw Error("gather-rows: empty index list");
  Tape::Entry e;
  e.op = Op::kGatherRows;
  e.a = x.id;
  e.value = detail::make(index.size(), cols, std::move(out));
  e.index = std::move(index);
  return x.tape->push(std::move(e));
}

/// out[r, 0] = x[r, index[r]]
inline Var select(Var x, std::vector<int> index) {
  const Tensor& xv = x.value();
  if (index.size() != xv.rows())
    throw Error("select: " + std::to_string(index.size()) + " indices for " + shape_str(xv.shape()));
  std::vector<Real> out(index.size());
  for (std::size_t r = 0; r < index.size(); ++r) {
    if (index[r] < 0 || static_cast<std::size_t>(index[r]) >= xv.cols())
      throw Error("select: column " + std::to_string(index[r]) + " out of range for " + shape_str(xv.shape()));
    out[r] = xv.at(r, static_cast<std::size_t>(index[r]));
  }
  Tape::Entry e;
  e.op = Op::kSelect;
  e.a = x.id;
  e.value = detail::make(index.size(), 1, std::move(out));
  e.index = std::move(index);
  return x.tape->push(std::move(e));
}

/// Row-wise softmax over positions with mask != 0; masked positions are 0.
/// The per-row maximum of admitted logits is subtracted before exponentiation.
inline Var masked_softmax(Var x, std::vector<std::uint8_t> mask) {
  const Tensor& xv = x.value();
  if (mask.size() != xv.size())
    throw Error("masked-softmax: mask of " + std::to_string(mask.size()) + " for " + shape_str(xv.shape()));
  const std::size_t rows = xv.rows();
  const std::size_t cols = xv.cols();
  std::vector<Real> out(xv.size(), Real(0));
  for (std::size_t r = 0; r < rows; ++r) {
    const Real* in = xv.data() + r * cols;
    const std::uint8_t* m = mask.data() + r * cols;
    Real* o = out.data() + r * cols;
    Real top = -std::numeric_limits<Real>::infinity();
    for (std::size_t c = 0; c < cols; ++c)
      if (m[c]) top = std::max(top, in[c]);
    if (top == -std::numeric_limits<Real>::infinity())
      throw Error("masked-softmax: row " + std::to_string(r) + " admits no position");
    Real total = 0;
    for (std::size_t c = 0; c < cols; ++c) {
      if (m[c]) {
        o[c] = std::exp(in[c] - top);
        total += o[c];
      }
    }
    for (std::size_t c = 0; c < cols; ++c) o[c] /= total;
  }
  Tape::Entry e;
  e.op = Op::kMaskedSoftmax;
  e.a = x.id;
  e.value = detail::make(rows, cols, std::move(out));
  e.mask = std::move(mask);
  return x.tape->push(std::move(e));
}

inline Var sum(Var x) {
  Real total = 0;
  for (Real v : x.value().values()) total += v;
  Tape::Entry e;
  e.op = Op::kSum;
  e.a = x.id;
  e.value = Tensor::scalar(total);
  return x.tape->push(std::move(e));
}

inline Var mean(Var x) {
  Real total = 0;
  for (Real v : x.value().values()) total += v;
  Tape::Entry e;
  e.op = Op::kMean;
  e.a = x.id;
  e.value = Tensor::scalar(total / static_cast<Real>(x.value().size()));
  return x.tape->push(std::move(e));
}

inline Var mean_rows(Var x) {
  const Tensor& xv = x.value();
  std::vector<Real> out(xv.cols(), Real(0));
  for (std::size_t r = 0; r < xv.rows(); ++r)
    for (std::size_t c = 0; c < xv.cols(); ++c) out[c] += xv.at(r, c);
  for (Real& v : out) v /= static_cast<Real>(xv.rows());
  Tape::Entry e;
  e.op = Op::kMeanRows;
  e.a = x.id;
  e.value = detail::make(1, xv.cols(), std::move(out));
  return x.tape->push(std::move(e));
}

inline GradientMap Tape::backprop(Var output, const Tensor& seed, const std::vector<std::string>& targets) const {
  using detail::as_matrix;
  using detail::MutMap;
  if (output.tape != this) throw Error("backprop: output belongs to another tape");
  const Tensor& out_value = value(output.id);
  if (seed.rows() != out_value.rows() || seed.cols() != out_value.cols())
    throw Error("backprop: seed shape " + shape_str(seed.shape()) + " does not match output " +
                shape_str(out_value.shape()));

  const std::size_t count = static_cast<std::size_t>(output.id) + 1;
  std::vector<char> needs(count, 0);
  for (const std::string& name : targets) {
    auto it = leaves_.find(name);
    if (it == leaves_.end()) throw Error("backprop: target '" + name + "' is not a leaf of this record");
    if (static_cast<std::size_t>(it->second) < count) needs[static_cast<std::size_t>(it->second)] = 1;
  }
  for (std::size_t i = 0; i < count; ++i) {
    const Entry& e = entries_[i];
    if (e.op == Op::kLeaf) continue;
    needs[i] = (e.a >= 0 && needs[static_cast<std::size_t>(e.a)]) || (e.b >= 0 && needs[static_cast<std::size_t>(e.b)]);
  }

  std::vector<std::vector<Real>> grads(count);
  auto grad_of = [&](int id) -> std::vector<Real>& {
    auto& g = grads[static_cast<std::size_t>(id)];
    if (g.empty()) g.assign(entries_[static_cast<std::size_t>(id)].value.size(), Real(0));
    return g;
  };
  auto wants = [&](int id) { return id >= 0 && needs[static_cast<std::size_t>(id)]; };

  if (needs[count - 1]) grads[count - 1] = seed.to_vector();

  for (std::size_t i = count; i-- > 0;) {
    const Entry& e = entries_[i];
    if (!needs[i] || e.op == Op::kLeaf || grads[i].empty()) continue;
    const std::vector<Real>& up = grads[i];
    const Tensor& y = e.value;
    const auto rows = static_cast<Eigen::Index>(y.rows());
    const auto cols = static_cast<Eigen::Index>(y.cols());
    detail::ConstMap dy(up.data(), rows, cols);

    switch (e.op) {
      case Op::kMatMul: {
        const Tensor& a = value(e.a);
        const Tensor& b = value(e.b);
        if (wants(e.a)) {
          MutMap(grad_of(e.a).data(), static_cast<Eigen::Index>(a.rows()), static_cast<Eigen::Index>(a.cols()))
              .noalias() += dy * as_matrix(b).transpose();
        }
        if (wants(e.b)) {
          MutMap(grad_of(e.b).data(), static_cast<Eigen::Index>(b.rows()), static_cast<Eigen::Index>(b.cols()))
              .noalias() += as_matrix(a).transpose() * dy;
        }
        break;
      }
      case Op::kTranspose: {
        MutMap(grad_of(e.a).data(), cols, rows) += dy.transpose();
        break;
      }
      case Op::kAdd: {
        if (wants(e.a)) {
          auto& g = grad_of(e.a);
          for (std::size_t k = 0; k < up.size(); ++k) g[k] += up[k];
        }
        if (wants(e.b)) {
          auto& g = grad_of(e.b);
          if (g.size() == up.size()) {
            for (std::size_t k = 0; k < up.size(); ++k) g[k] += up[k];
          } else {
            for (std::size_t k = 0; k < up.size(); ++k) g[k % g.size()] += up[k];
          }
        }
        break;
      }
      case Op::kRelu: {
        const Tensor& x = value(e.a);
        auto& g = grad_of(e.a);
        for (std::size_t k = 0; k < up.size(); ++k)
          if (x[k] > 0) g[k] += up[k];
        break;
      }
      case Op::kTanh: {
        auto& g = grad_of(e.a);
        for (std::size_t k = 0; k < up.size(); ++k) g[k] += up[k] * (Real(1) - y[k] * y[k]);
        break;
      }
      case Op::kScale: {
        auto& g = grad_of(e.a);
        for (std::size_t k = 0; k < up.size(); ++k) g[k] += up[k] * e.factor;
        break;
      }
      case Op::kLog: {
        const Tensor& x = value(e.a);
        auto& g = grad_of(e.a);
        for (std::size_t k = 0; k < up.size(); ++k) g[k] += up[k] / x[k];
        break;
      }
      case Op::kExp: {
        auto& g = grad_of(e.a);
        for (std::size_t k = 0; k < up.size(); ++k) g[k] += up[k] * y[k];
        break;
      }
      case Op::kGatherRows: {
        auto& g = grad_of(e.a);
        const std::size_t c = y.cols();
        for (std::size_t r = 0; r < e.index.size(); ++r) {
          Real* dst = g.data() + static_cast<std::size_t>(e.index[r]) * c;
          const Real* src = up.data() + r * c;
          for (std::size_t k = 0; k < c; ++k) dst[k] += src[k];
        }
        break;
      }
      case Op::kSelect: {
        auto& g = grad_of(e.a);
        const std::size_t c = value(e.a).cols();
        for (std::size_t r = 0; r < e.index.size(); ++r) g[r * c + static_cast<std::size_t>(e.index[r])] += up[r];
        break;
      }
      case Op::kMaskedSoftmax: {
        auto& g = grad_of(e.a);
        const std::size_t c = y.cols();
        for (std::size_t r = 0; r < y.rows(); ++r) {
          const Real* yr = y.data() + r * c;
          const Real* ur = up.data() + r * c;
          Real dot = 0;
          for (std::size_t k = 0; k < c; ++k) dot += yr[k] * ur[k];
          Real* gr = g.data() + r * c;
          for (std::size_t k = 0; k < c; ++k) gr[k] += yr[k] * (ur[k] - dot);
        }
        break;
      }
      case Op::kSum: {
        auto& g = grad_of(e.a);
        for (Real& v : g) v += up[0];
        break;
      }
      case Op::kMean: {
        auto& g = grad_of(e.a);
        const Real share = up[0] / static_cast<Real>(g.size());
        for (Real& v : g) v += share;
        break;
      }
      case Op::kMeanRows: {
        auto& g = grad_of(e.a);
        const std::size_t c = y.cols();
        const std::size_t r_in = g.size() / c;
        for (std::size_t r = 0; r < r_in; ++r)
          for (std::size_t k = 0; k < c; ++k) g[r * c + k] += up[k] / static_cast<Real>(r_in);
        break;
      }
      case Op::kLeaf:
        break;
    }
  }

  GradientMap result;
  for (const std::string& name : targets) {
    const int id = leaves_.at(name);
    const Tensor& v = value(id);
    if (static_cast<std::size_t>(id) < count && !grads[static_cast<std::size_t>(id)].empty()) {
      result.insert_or_assign(name, Tensor(v.shape(), std::move(grads[static_cast<std::size_t>(id)])));
    } else {
      result.insert_or_assign(name, Tensor(v.shape(), std::vector<Real>(v.size(), Real(0))));
    }
  }
  return result;
}

/// Puts every parameter on the tape: trainable entries as named leaves,
/// frozen entries as constants.
inline std::map<std::string, Var> bind(Tape& tape, const NamedParamSet& params) {
  std::map<std::string, Var> vars;
  for (const auto& e : params.entries())
    vars.emplace(e.name, e.trainable ? tape.leaf(e.value, e.name) : tape.constant(e.value));
  return vars;
}

using ScalarFunction = std::function<Var(Tape&, const std::map<std::string, Var>&)>;

/// Worst elementwise relative error between backprop gradients of `fn` with
/// respect to the trainable entries of `params` and central differences.
inline Real grad_check(const ScalarFunction& fn, const NamedParamSet& params, Real step) {
  if (!(step > 0)) throw Error("grad_check: step must be positive");
  auto evaluate = [&](const NamedParamSet& p) {
    Tape tape;
    const Real v = fn(tape, bind(tape, p)).value().item();
    if (!std::isfinite(v)) throw Error("grad_check: function value is not finite");
    return v;
  };

  Tape tape;
  Var out = fn(tape, bind(tape, params));
  if (out.value().size() != 1) throw Error("grad_check: function must return a scalar");
  if (!std::isfinite(out.value().item())) throw Error("grad_check: function value is not finite");
  const GradientMap analytic = tape.backprop(out, Tensor::scalar(1), params.trainable_names());

  Real worst = 0;
  NamedParamSet probe = params;
  for (const auto& [name, grad] : analytic) {
    const Tensor base = params.get(name);
    for (std::size_t i = 0; i < base.size(); ++i) {
      std::vector<Real> bumped = base.to_vector();
      bumped[i] = base[i] + step;
      probe.set(name, Tensor(base.shape(), bumped));
      const Real up = evaluate(probe);
      bumped[i] = base[i] - step;
      probe.set(name, Tensor(base.shape(), bumped));
      const Real down = evaluate(probe);
      const Real numeric = (up - down) / (2 * step);
      const Real a = grad[i];
      const Real denom = std::max({std::abs(a), std::abs(numeric), Real(1e-12)});
      worst = std::max(worst, std::abs(a - numeric) / denom);
    }
    probe.set(name, base);
  }
  return worst;
}

}  // namespace eas
