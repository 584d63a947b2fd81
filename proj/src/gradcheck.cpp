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

#include "dca/gradcheck.hpp"

#include <cmath>
#include <string>

#include "dca/error.hpp"

namespace dca {

double evaluate_loss(const ParamStore& store, const LossBuilder& build) {
  ad::Tape tape(store);
  return build(tape).scalar();
}

Matrix analytic_gradient(const ParamStore& store, std::string_view param,
                         const LossBuilder& build) {
  Gradients sink(store);
  ad::Tape tape(store, &sink);
  tape.backward(build(tape));
  return sink[store.index(param)];
}

Matrix numeric_gradient(ParamStore& store, std::string_view param, const LossBuilder& build,
                        double eps) {
  Matrix& w = store.value(param);
  const double base = evaluate_loss(store, build);
  if (evaluate_loss(store, build) != base) {
    throw OracleInvalidError("fd_check: loss for '" + std::string(param) +
                             "' is not reproducible at a fixed point");
  }
  Matrix out(w.rows(), w.cols());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double saved = w[i];
    w[i] = saved + eps;
    const double up = evaluate_loss(store, build);
    w[i] = saved - eps;
    const double down = evaluate_loss(store, build);
    w[i] = saved;
    out[i] = (up - down) / (2.0 * eps);
  }
  return out;
}

FdReport fd_compare(ParamStore& store, std::string_view param, const LossBuilder& build,
                    const Matrix& analytic, double eps) {
  check_shapes(store.value(param).same_shape(analytic), "fd_compare", store.value(param), analytic);
  const Matrix numeric = numeric_gradient(store, param, build, eps);
  FdReport report;
  for (std::size_t i = 0; i < numeric.size(); ++i) {
    const double err = std::abs(analytic[i] - numeric[i]) / (std::abs(numeric[i]) + 1e-8);
    if (i == 0 || !(err <= report.max_rel_error)) {
      report.max_rel_error = err;
      report.worst_index = i;
      report.analytic = analytic[i];
      report.numeric = numeric[i];
    }
  }
  return report;
}

double fd_check(ParamStore& store, std::string_view param, const LossBuilder& build, double eps) {
  const Matrix analytic = analytic_gradient(store, param, build);
  return fd_compare(store, param, build, analytic, eps).max_rel_error;
}

}  // namespace dca
