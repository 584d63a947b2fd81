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

// Multi-perspective co-attention between frame states Hv (n x d) and text
// states Hx (m x d). Each perspective k owns a square matrix L_k and scores
//
//     S_k = (Hv L_k)(Hx L_k)^T = Hv (L_k L_k^T) Hx^T,
//
// i.e. an inner product under the metric L_k L_k^T, which is positive
// semidefinite whatever L_k is. Rows of S_k are softmax-normalized into
// frame->text weights, rows of S_k^T into text->frame weights, and the
// attended states of all perspectives are averaged. There is no temperature
// or 1/sqrt(d) scaling.

#ifndef DCA_COATTENTION_HPP_
#define DCA_COATTENTION_HPP_

#include <span>
#include <vector>

#include "dca/model.hpp"
#include "dca/tape.hpp"

namespace dca::coattention {

/// Output of one perspective.
struct Perspective {
  ad::Var Cx;  // n x d, text states attended by each frame
  ad::Var Cv;  // m x d, frame states attended by each token
  ad::Var S;   // n x m
};

struct CoDependent {
  ad::Var Cx;                // n x d, mean over perspectives
  ad::Var Cv;                // m x d
  std::vector<ad::Var> S;    // one n x m similarity matrix per perspective
};

/// Hv L L^T Hx^T, computed as (Hv L)(Hx L)^T.
ad::Var similarity(ad::Var Hv, ad::Var Hx, ad::Var L);

Perspective co_attend(ad::Var Hv, ad::Var Hx, ad::Var L);

/// Mean-pools co_attend over the given metrics (at least one).
CoDependent dca_forward(ad::Var Hv, ad::Var Hx, std::span<const ad::Var> metrics);

/// The metrics a model uses: its K learnable matrices, or a single constant
/// identity for the traditional configuration.
std::vector<ad::Var> bind_metrics(ad::Tape& tape, const ModelConfig& cfg);

/// Mean Pearson correlation over all pairs of vectorized similarity matrices.
/// A constant matrix correlates 0 with anything. Needs at least two matrices.
double mean_pairwise_correlation(std::span<const Matrix> S);

}  // namespace dca::coattention

#endif  // DCA_COATTENTION_HPP_
