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

#ifndef DCA_OPTIM_HPP_
#define DCA_OPTIM_HPP_

#include "dca/params.hpp"

namespace dca {

struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// One bias-corrected Adam update of every parameter from store.grads(),
/// then zeroes the gradients and bumps the step counter. Throws NumericError
/// naming the parameter if any gradient is NaN/Inf (nothing is updated then).
void adam_step(ParamStore& store, const AdamConfig& cfg);

}  // namespace dca

#endif  // DCA_OPTIM_HPP_
