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

#ifndef DCA_PARAMS_HPP_
#define DCA_PARAMS_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dca/matrix.hpp"
#include "dca/rng.hpp"

namespace dca {

/// Gradient buffers aligned index-for-index with a ParamStore.
class Gradients {
 public:
  Gradients() = default;
  explicit Gradients(const class ParamStore& store);

  std::size_t size() const { return grads_.size(); }
  Matrix& operator[](std::size_t i) { return grads_[i]; }
  const Matrix& operator[](std::size_t i) const { return grads_[i]; }

  void zero();
  void append(std::size_t rows, std::size_t cols) { grads_.emplace_back(rows, cols); }
  /// this += scale * other, parameter by parameter in index order.
  void accumulate(const Gradients& other, double scale = 1.0);

 private:
  std::vector<Matrix> grads_;
};

/// Every learnable tensor by stable name, its gradient buffer, and the Adam
/// moments. Insertion order is the canonical order used for checkpoints and
/// for deterministic reductions.
class ParamStore {
 public:
  /// Registers a parameter; throws if the name is taken.
  std::size_t add(std::string name, Matrix value);

  bool contains(std::string_view name) const;
  std::size_t index(std::string_view name) const;
  std::size_t size() const { return values_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(std::size_t i) const { return names_[i]; }

  Matrix& value(std::size_t i) { return values_[i]; }
  const Matrix& value(std::size_t i) const { return values_[i]; }
  Matrix& value(std::string_view name) { return values_[index(name)]; }
  const Matrix& value(std::string_view name) const { return values_[index(name)]; }

  Gradients& grads() { return grads_; }
  const Gradients& grads() const { return grads_; }
  Matrix& grad(std::string_view name) { return grads_[index(name)]; }
  const Matrix& grad(std::string_view name) const { return grads_[index(name)]; }
  void zero_grad() { grads_.zero(); }

  // Adam state.
  std::vector<Matrix>& first_moments() { return m_; }
  std::vector<Matrix>& second_moments() { return v_; }
  const std::vector<Matrix>& first_moments() const { return m_; }
  const std::vector<Matrix>& second_moments() const { return v_; }
  std::uint64_t step() const { return step_; }
  void set_step(std::uint64_t s) { step_ = s; }

  std::size_t num_scalars() const;

 private:
  std::vector<std::string> names_;
  std::map<std::string, std::size_t, std::less<>> lookup_;
  std::vector<Matrix> values_;
  Gradients grads_;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
  std::uint64_t step_ = 0;
};

/// uniform(-a, a) with a = sqrt(6 / (fan_in + fan_out)).
Matrix glorot_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng);
Matrix uniform_matrix(std::size_t rows, std::size_t cols, double bound, Rng& rng);
Matrix normal_matrix(std::size_t rows, std::size_t cols, double stddev, Rng& rng);

// ---------------------------------------------------------------------------
// Checkpoint file:
//   "DCACKPT" '\0'           8-byte magic
//   u32 version (=1)
//   u32 entry count
//   per entry: u32 name length, name bytes (UTF-8), u64 rows, u64 cols
//   then every entry's payload in table order, rows*cols IEEE-754 doubles
// All integers and doubles little-endian.
// ---------------------------------------------------------------------------

using NamedMatrices = std::vector<std::pair<std::string, Matrix>>;

constexpr std::uint32_t kCheckpointVersion = 1;

void write_checkpoint(const std::filesystem::path& path, const NamedMatrices& entries);
NamedMatrices read_checkpoint(const std::filesystem::path& path);

/// Parameters, optionally followed by "adam.m/<name>", "adam.v/<name>" and a
/// 1x1 "adam.step" entry.
NamedMatrices export_store(const ParamStore& store, bool with_optimizer);
/// Rebuilds a store from checkpoint entries; "meta/" and "adam." entries are
/// not parameters.
ParamStore import_store(const NamedMatrices& entries);

}  // namespace dca

#endif  // DCA_PARAMS_HPP_
