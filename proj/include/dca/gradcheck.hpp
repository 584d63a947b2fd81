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

#ifndef DCA_GRADCHECK_HPP_
#define DCA_GRADCHECK_HPP_

#include <cstddef>
#include <functional>
#include <string_view>

#include "dca/params.hpp"
#include "dca/tape.hpp"

namespace dca {

/// Builds a scalar loss on the given tape from the parameters the tape is
/// bound to. Must be deterministic.
using LossBuilder = std::function<ad::Var(ad::Tape&)>;

struct FdReport {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
};

/// Forward-only loss value.
double evaluate_loss(const ParamStore& store, const LossBuilder& build);

/// Reverse-mode gradient of the loss with respect to one parameter.
Matrix analytic_gradient(const ParamStore& store, std::string_view param, const LossBuilder& build);

/// Compares `analytic` against central differences (f(x+eps) - f(x-eps)) / 2eps
/// coordinate by coordinate. Error per element is
/// |analytic - numeric| / (|numeric| + 1e-8). Throws OracleInvalidError when
/// two evaluations at the same point disagree.
/// Central differences (f(x+eps) - f(x-eps)) / 2eps for every element of
/// `param`. Throws OracleInvalidError when the loss is not reproducible.
Matrix numeric_gradient(ParamStore& store, std::string_view param, const LossBuilder& build,
                        double eps = 1e-5);

FdReport fd_compare(ParamStore& store, std::string_view param, const LossBuilder& build,
                    const Matrix& analytic, double eps = 1e-5);

/// analytic_gradient + fd_compare; returns the max relative error.
double fd_check(ParamStore& store, std::string_view param, const LossBuilder& build,
                double eps = 1e-5);

}  // namespace dca

#endif  // DCA_GRADCHECK_HPP_
