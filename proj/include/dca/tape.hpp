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

#ifndef DCA_TAPE_HPP_
#define DCA_TAPE_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dca/matrix.hpp"
#include "dca/params.hpp"
#include "dca/rng.hpp"

namespace dca::ad {

class Tape;

/// Handle to a node on a Tape. Cheap to copy; valid while its tape lives.
struct Var {
  Tape* tape = nullptr;
  std::uint32_t id = 0;

  const Matrix& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
  /// Value of a 1x1 node.
  double scalar() const;
};

/// Reverse-mode record of one forward computation.
///
/// Parameter leaves read their values from a ParamStore and, when the tape
/// was created with a gradient sink, accumulate into that sink on backward().
/// A tape without a sink records values only (inference).
class Tape {
 public:
  Tape(const ParamStore& store, Gradients* sink);
  /// Inference tape over `store` (no gradient bookkeeping).
  explicit Tape(const ParamStore& store) : Tape(store, nullptr) {}

  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool recording() const { return sink_ != nullptr; }
  const ParamStore& store() const { return *store_; }

  Var param(std::string_view name);
  Var constant(Matrix value);

  const Matrix& value(Var v) const;
  bool requires_grad(Var v) const { return nodes_[v.id].requires_grad; }
  std::size_t num_nodes() const { return nodes_.size(); }

  /// Seeds d(loss) = seed and propagates to every ancestor. May be called once.
  void backward(Var loss, double seed = 1.0);

  using Backprop =
      std::function<void(Tape&, const Matrix& out_value, const Matrix& out_grad)>;

  /// Appends an op result. `backprop` is dropped unless some parent requires
  /// a gradient.
  Var push(Matrix value, std::initializer_list<Var> parents, Backprop backprop);
  Var push(Matrix value, std::span<const Var> parents, Backprop backprop);

  /// Inference tapes only: drop every node pushed after `mark` so one
  /// forward prefix can be shared by many continuations.
  std::size_t mark() const { return nodes_.size(); }
  void rewind(std::size_t mark);

  /// Gradient accumulator for `v` (allocated on first use).
  Matrix& grad(Var v);

 private:
  struct Node {
    Matrix value;
    const Matrix* ref = nullptr;  // parameter leaves alias the store
    Matrix grad;
    Matrix* grad_target = nullptr;  // parameter leaves write into the sink
    bool requires_grad = false;
    bool touched = false;
    Backprop backprop;
  };

  const ParamStore* store_;
  Gradients* sink_;
  std::vector<Node> nodes_;
  std::map<std::size_t, std::uint32_t> param_nodes_;
  bool backward_done_ = false;
};

// Differentiable ops. Vectors are 1 x n rows throughout.

Var matmul(Var a, Var b);
/// a * b^T
Var matmul_nt(Var a, Var b);
Var transpose(Var a);
Var add(Var a, Var b);
Var sub(Var a, Var b);
/// Adds a 1 x c row to every row of a.
Var add_row(Var a, Var row);
Var mul(Var a, Var b);
Var scale(Var a, double s);
/// 1 - a elementwise.
Var one_minus(Var a);
Var add_scalar(Var a, double c);
Var sigmoid(Var a);
Var tanh(Var a);
Var softmax_rows(Var a);
/// [a, b] side by side (same row count).
Var concat_cols(Var a, Var b);
Var row(Var a, std::size_t i);
Var stack_rows(std::span<const Var> rows);
/// Rows of `table` selected by `ids`, stacked.
Var gather_rows(Var table, std::span<const std::size_t> ids);
/// Row-major flatten of a^T b for 1 x p and 1 x q rows: 1 x (p*q), entry
/// (i*q + j) = a_i b_j.
Var outer_flat(Var a, Var b);
/// Elementwise mean of equally shaped nodes.
Var mean(std::span<const Var> xs);
/// Sum of all entries, 1x1.
Var sum(Var a);
/// sum_ij a_ij b_ij as 1x1 (= tr(a b^T)).
Var frobenius_dot(Var a, Var b);
/// -log softmax(logits)[target] for 1 x V logits, 1x1.
Var nll(Var logits, std::size_t target);
/// Inverted dropout; identity when rate == 0.
Var dropout(Var a, double rate, Rng& rng);

}  // namespace dca::ad

#endif  // DCA_TAPE_HPP_
