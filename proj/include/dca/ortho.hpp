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

// Orthonormality of the perspective metrics {L_k} under the Frobenius inner
// product <A, B> = tr(A B^T).
//
//   R(L)        = beta/4 * sum_ij (<L_i, L_j> - [i == j])^2
//   dR/dL_i     = beta * (sum_k <L_i, L_k> L_k - L_i)
//   post-update   L_i <- L_i - dR/dL_i
//               = (1 + beta) L_i - beta * sum_k <L_i, L_k> L_k
//
// The post-update is one gradient step on R with the step size folded into
// beta. It runs after every optimizer step, outside the differentiated graph.

#ifndef DCA_ORTHO_HPP_
#define DCA_ORTHO_HPP_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dca/matrix.hpp"
#include "dca/params.hpp"
#include "dca/tape.hpp"

namespace dca::ortho {

enum class Mode {
  /// Every L_i is updated from the pre-update family.
  kSimultaneous,
  /// L_1..L_K in order, each seeing the already-updated predecessors.
  kSequential,
  /// No post-update; R is added to the training loss instead.
  kLossTerm,
};

std::string_view to_string(Mode mode);
Mode mode_from_string(std::string_view text);

struct OrthoConfig {
  bool enabled = true;
  double beta = 0.01;
  Mode mode = Mode::kSimultaneous;
};

/// K x K matrix of <L_i, L_j>.
Matrix gram(std::span<const Matrix> Ls);
/// sum_{i != j} |<L_i, L_j>|.
double off_diagonal_mass(const Matrix& gram);

double r_beta(std::span<const Matrix> Ls, double beta);
Matrix r_beta_grad(std::span<const Matrix> Ls, double beta, std::size_t i);
void ortho_update(std::vector<Matrix>& Ls, double beta, Mode mode = Mode::kSimultaneous);

/// Differentiable R on a tape.
ad::Var r_beta(std::span<const ad::Var> Ls, double beta);

/// Post-step hook for a model's metrics (no-op for loss-term mode, when
/// disabled, or when the store has no learnable metrics).
void apply_post_update(ParamStore& store, const OrthoConfig& cfg);

/// Adds dR/dL_k for the store's metrics into `sink` and returns R.
double accumulate_regularizer(const ParamStore& store, double beta, Gradients& sink);

/// Current metrics of a store, in perspective order.
std::vector<Matrix> metrics_of(const ParamStore& store);

}  // namespace dca::ortho

#endif  // DCA_ORTHO_HPP_
