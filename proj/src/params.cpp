// Copyright 2026 The DCA Authors. All Rights Reserved.
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

#include "dca/params.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "dca/error.hpp"

namespace dca {

Gradients::Gradients(const ParamStore& store) {
  grads_.reserve(store.size());
  for (std::size_t i = 0; i < store.size(); ++i) {
    grads_.emplace_back(store.value(i).rows(), store.value(i).cols());
  }
}

void Gradients::zero() {
  for (auto& g : grads_) g.fill(0.0);
}

void Gradients::accumulate(const Gradients& other, double scale) {
  if (other.size() != size()) throw DimensionError("Gradients::accumulate: size mismatch");
  for (std::size_t i = 0; i < grads_.size(); ++i) grads_[i].add_scaled(other[i], scale);
}

std::size_t ParamStore::add(std::string name, Matrix value) {
  if (lookup_.contains(name)) throw Error("ParamStore: duplicate parameter '" + name + "'");
  const std::size_t idx = values_.size();
  lookup_.emplace(name, idx);
  names_.push_back(std::move(name));
  m_.emplace_back(value.rows(), value.cols());
  v_.emplace_back(value.rows(), value.cols());
  values_.push_back(std::move(value));
  grads_.append(values_.back().rows(), values_.back().cols());
  return idx;
}

bool ParamStore::contains(std::string_view name) const { return lookup_.find(name) != lookup_.end(); }

std::size_t ParamStore::index(std::string_view name) const {
  auto it = lookup_.find(name);
  if (it == lookup_.end()) throw Error("ParamStore: unknown parameter '" + std::string(name) + "'");
  return it->second;
}

std::size_t ParamStore::num_scalars() const {
  std::size_t n = 0;
  for (const auto& v : values_) n += v.size();
  return n;
}

Matrix glorot_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  return uniform_matrix(fan_in, fan_out, a, rng);
}

Matrix uniform_matrix(std::size_t rows, std::size_t cols, double bound, Rng& rng) {
  Matrix m(rows, cols);
  for (double& x : m.data()) x = rng.uniform(-bound, bound);
  return m;
}

Matrix normal_matrix(std::size_t rows, std::size_t cols, double stddev, Rng& rng) {
  Matrix m(rows, cols);
  for (double& x : m.data()) x = stddev * rng.normal();
  return m;
}

namespace {

constexpr char kMagic[8] = {'D', 'C', 'A', 'C', 'K', 'P', 'T', '\0'};

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::is_unsigned_v<T>);
  unsigned char buf[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<unsigned char>(value >> (8 * i));
  out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  unsigned char buf[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(buf), sizeof(T))) throw Error("checkpoint: truncated file");
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(buf[i]) << (8 * i);
  return value;
}

}  // namespace

void write_checkpoint(const std::filesystem::path& path, const NamedMatrices& entries) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("checkpoint: cannot open " + path.string() + " for writing");
  out.write(kMagic, sizeof(kMagic));
  put_le<std::uint32_t>(out, kCheckpointVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(entries.size()));
  for (const auto& [name, m] : entries) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    put_le<std::uint64_t>(out, m.rows());
    put_le<std::uint64_t>(out, m.cols());
  }
  for (const auto& [name, m] : entries) {
    for (double v : m.data()) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  }
  if (!out) throw Error("checkpoint: write failed for " + path.string());
}

NamedMatrices read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("checkpoint: cannot open " + path.string());
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw Error("checkpoint: bad magic in " + path.string());
  }
  const auto version = get_le<std::uint32_t>(in);
  if (version != kCheckpointVersion) {
    throw Error("checkpoint: unsupported version " + std::to_string(version));
  }
  const auto count = get_le<std::uint32_t>(in);
  NamedMatrices entries;
  entries.reserve(count);
  std::vector<std::pair<std::uint64_t, std::uint64_t>> shapes;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto len = get_le<std::uint32_t>(in);
    std::string name(len, '\0');
    if (!in.read(name.data(), len)) throw Error("checkpoint: truncated name table");
    const auto rows = get_le<std::uint64_t>(in);
    const auto cols = get_le<std::uint64_t>(in);
    entries.emplace_back(std::move(name), Matrix());
    shapes.emplace_back(rows, cols);
  }
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto [rows, cols] = shapes[i];
    std::vector<double> data(rows * cols);
    for (double& v : data) v = std::bit_cast<double>(get_le<std::uint64_t>(in));
    entries[i].second = Matrix(rows, cols, std::move(data));
  }
  return entries;
}

NamedMatrices export_store(const ParamStore& store, bool with_optimizer) {
  NamedMatrices out;
  for (std::size_t i = 0; i < store.size(); ++i) out.emplace_back(store.name(i), store.value(i));
  if (with_optimizer) {
    for (std::size_t i = 0; i < store.size(); ++i) {
      out.emplace_back("adam.m/" + store.name(i), store.first_moments()[i]);
    }
    for (std::size_t i = 0; i < store.size(); ++i) {
      out.emplace_back("adam.v/" + store.name(i), store.second_moments()[i]);
    }
    out.emplace_back("adam.step", Matrix(1, 1, static_cast<double>(store.step())));
  }
  return out;
}

ParamStore import_store(const NamedMatrices& entries) {
  ParamStore store;
  for (const auto& [name, m] : entries) {
    if (name.starts_with("adam.") || name.starts_with("meta/")) continue;
    store.add(name, m);
  }
  for (const auto& [name, m] : entries) {
    if (name.starts_with("adam.m/")) {
      store.first_moments()[store.index(name.substr(7))] = m;
    } else if (name.starts_with("adam.v/")) {
      store.second_moments()[store.index(name.substr(7))] = m;
    } else if (name == "adam.step") {
      store.set_step(static_cast<std::uint64_t>(m[0]));
    }
  }
  return store;
}

}  // namespace dca
