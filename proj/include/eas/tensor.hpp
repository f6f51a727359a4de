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

#include <cstddef>
#include <memory>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace eas {

#ifdef EAS_REAL_FLOAT
using Real = float;
#else
using Real = double;
#endif

/// Raised for every contract violation in the library: shape mismatches,
/// infeasible actions, malformed files. The message names the cause.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Shape = std::vector<std::size_t>;

inline std::string shape_str(const Shape& s) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
  os << ']';
  return os.str();
}

/// Dense row-major array of rank 1 or 2. Values are immutable once built;
/// copies share storage, so passing tensors around is cheap.
class Tensor {
 public:
  Tensor() : Tensor(Shape{1, 1}, std::vector<Real>{0}) {}

  Tensor(Shape shape, std::vector<Real> data) : shape_(std::move(shape)) {
    if (shape_.empty() || shape_.size() > 2)
      throw Error("tensor rank must be 1 or 2, got shape " + shape_str(shape_));
    std::size_t count = 1;
    for (std::size_t d : shape_) {
      if (d == 0) throw Error("tensor dimensions must be positive: " + shape_str(shape_));
      count *= d;
    }
    if (count != data.size())
      throw Error("tensor shape " + shape_str(shape_) + " does not match " +
                  std::to_string(data.size()) + " values");
    data_ = std::make_shared<const std::vector<Real>>(std::move(data));
  }

  static Tensor zeros(std::size_t rows, std::size_t cols) {
    return Tensor({rows, cols}, std::vector<Real>(rows * cols, Real(0)));
  }
  static Tensor filled(std::size_t rows, std::size_t cols, Real v) {
    return Tensor({rows, cols}, std::vector<Real>(rows * cols, v));
  }
  static Tensor scalar(Real v) { return Tensor({1, 1}, {v}); }

  const Shape& shape() const { return shape_; }
  // Rank-1 tensors are viewed as a single row.
  std::size_t rows() const { return shape_.size() == 2 ? shape_[0] : 1; }
  std::size_t cols() const { return shape_.back(); }
  std::size_t size() const { return data_->size(); }

  std::span<const Real> values() const { return *data_; }
  const Real* data() const { return data_->data(); }
  Real operator[](std::size_t i) const { return (*data_)[i]; }
  Real at(std::size_t r, std::size_t c) const { return (*data_)[r * cols() + c]; }
  Real item() const {
    if (size() != 1) throw Error("item() on tensor of shape " + shape_str(shape_));
    return (*data_)[0];
  }

  /// Same values, new shape with identical element count.
  Tensor reshaped(Shape shape) const {
    Tensor t = *this;
    std::size_t count = 1;
    for (std::size_t d : shape) count *= d;
    if (count != size() || shape.empty() || shape.size() > 2)
      throw Error("cannot reshape " + shape_str(shape_) + " to " + shape_str(shape));
    t.shape_ = std::move(shape);
    return t;
  }

  std::vector<Real> to_vector() const { return *data_; }

  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.shape_ == b.shape_ && *a.data_ == *b.data_;
  }

 private:
  Shape shape_;
  std::shared_ptr<const std::vector<Real>> data_;
};

}  // namespace eas
