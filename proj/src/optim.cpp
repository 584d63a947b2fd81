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

#include "dca/optim.hpp"

#include <cmath>

#include "dca/error.hpp"

namespace dca {

void adam_step(ParamStore& store, const AdamConfig& cfg) {
  for (std::size_t p = 0; p < store.size(); ++p) {
    if (!store.grads()[p].all_finite()) {
      throw NumericError("adam_step: non-finite gradient for parameter '" + store.name(p) + "'");
    }
  }
  store.set_step(store.step() + 1);
  const double t = static_cast<double>(store.step());
  const double c1 = 1.0 - std::pow(cfg.beta1, t);
  const double c2 = 1.0 - std::pow(cfg.beta2, t);
  for (std::size_t p = 0; p < store.size(); ++p) {
    Matrix& w = store.value(p);
    Matrix& g = store.grads()[p];
    Matrix& m = store.first_moments()[p];
    Matrix& v = store.second_moments()[p];
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      const double mhat = m[i] / c1;
      const double vhat = v[i] / c2;
      w[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
    g.fill(0.0);
  }
}

}  // namespace dca
