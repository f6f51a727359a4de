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

// Checkpoint container, little-endian:
//
//   char[8]  magic "EASCKPT\0"
//   u32      format version (kCheckpointVersion)
//   u32      problem kind (0 = TSP, 1 = CVRP)
//   u32      d
//   u32      adapter hidden width d_h
//   f64      logit clipping constant
//   u32      tensor count
//   per tensor:
//     u32 name length, name bytes
//     u32 rank, u64 dims[rank]
//     f64 values[prod(dims)], row-major
//
// Tensors appear in parameter_layout() order.

#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "eas/model.hpp"

namespace eas {

inline constexpr std::uint32_t kCheckpointVersion = 1;
inline constexpr char kCheckpointMagic[8] = {'E', 'A', 'S', 'C', 'K', 'P', 'T', '\0'};

namespace detail {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::string bytes) : bytes_(std::move(bytes)) {}

  template <typename T>
  T get(const char* what) {
    if (pos_ + sizeof(T) > bytes_.size()) throw Error(std::string("corrupt checkpoint: truncated while reading ") + what);
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  std::string text(std::size_t n, const char* what) {
    if (pos_ + n > bytes_.size()) throw Error(std::string("corrupt checkpoint: truncated while reading ") + what);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::string bytes_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline std::string serialize_checkpoint(const PolicyModel& model) {
  std::string out(kCheckpointMagic, sizeof(kCheckpointMagic));
  detail::put<std::uint32_t>(out, kCheckpointVersion);
  detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(model.config.kind));
  detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(model.config.d));
  detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(model.config.adapter_hidden));
  detail::put<double>(out, static_cast<double>(model.config.clip));
  detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(model.params.size()));
  for (const auto& e : model.params.entries()) {
    detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(e.name.size()));
    out += e.name;
    detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(e.value.shape().size()));
    for (std::size_t dim : e.value.shape()) detail::put<std::uint64_t>(out, dim);
    for (Real v : e.value.values()) detail::put<double>(out, static_cast<double>(v));
  }
  return out;
}

inline PolicyModel deserialize_checkpoint(std::string bytes) {
  detail::Reader in(std::move(bytes));
  if (in.text(sizeof(kCheckpointMagic), "magic") != std::string(kCheckpointMagic, sizeof(kCheckpointMagic)))
    throw Error("corrupt checkpoint: bad magic");
  const auto version = in.get<std::uint32_t>("version");
  if (version != kCheckpointVersion)
    throw Error("checkpoint version mismatch: file has " + std::to_string(version) + ", expected " +
                std::to_string(kCheckpointVersion));
  PolicyModel model;
  const auto kind = in.get<std::uint32_t>("kind");
  if (kind > 1) throw Error("corrupt checkpoint: unknown problem kind " + std::to_string(kind));
  model.config.kind = static_cast<ProblemKind>(kind);
  model.config.d = static_cast<int>(in.get<std::uint32_t>("d"));
  model.config.adapter_hidden = static_cast<int>(in.get<std::uint32_t>("d_h"));
  model.config.clip = static_cast<Real>(in.get<double>("clip"));
  validate(model.config);
  const auto layout = parameter_layout(model.config);
  const auto count = in.get<std::uint32_t>("tensor count");
  if (count != layout.size())
    throw Error("checkpoint shape mismatch: " + std::to_string(count) + " tensors, expected " + std::to_string(layout.size()));
  for (const auto& [expected_name, expected_shape] : layout) {
    const std::string name = in.text(in.get<std::uint32_t>("name length"), "name");
    if (name != expected_name) throw Error("checkpoint shape mismatch: found tensor '" + name + "', expected '" + expected_name + "'");
    const auto rank = in.get<std::uint32_t>("rank");
    if (rank == 0 || rank > 2) throw Error("corrupt checkpoint: tensor '" + name + "' has rank " + std::to_string(rank));
    Shape shape;
    std::size_t total = 1;
    for (std::uint32_t r = 0; r < rank; ++r) {
      shape.push_back(static_cast<std::size_t>(in.get<std::uint64_t>("dims")));
      total *= shape.back();
    }
    if (shape != expected_shape)
      throw Error("checkpoint shape mismatch for '" + name + "': " + shape_str(shape) + " vs expected " + shape_str(expected_shape));
    std::vector<Real> values(total);
    for (Real& v : values) v = static_cast<Real>(in.get<double>("values"));
    model.params.add(name, Tensor(shape, std::move(values)));
  }
  if (!in.done()) throw Error("corrupt checkpoint: trailing bytes");
  return model;
}

inline void save_checkpoint(const PolicyModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  const std::string bytes = serialize_checkpoint(model);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write to '" + path + "' failed");
}

inline PolicyModel load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_checkpoint(buf.str());
}

/// Loads and rejects any header field that disagrees with `expected`.
inline PolicyModel load_checkpoint(const std::string& path, const ModelConfig& expected) {
  PolicyModel model = load_checkpoint(path);
  const ModelConfig& c = model.config;
  if (c.kind != expected.kind) throw Error("checkpoint problem kind mismatch");
  if (c.d != expected.d)
    throw Error("checkpoint d mismatch: file has " + std::to_string(c.d) + ", config expects " + std::to_string(expected.d));
  if (c.adapter_hidden != expected.adapter_hidden) throw Error("checkpoint adapter width mismatch");
  if (c.clip != expected.clip) throw Error("checkpoint clipping constant mismatch");
  return model;
}

}  // namespace eas
