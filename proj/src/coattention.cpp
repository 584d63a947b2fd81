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

#include "dca/coattention.hpp"

#include <cmath>

#include "dca/error.hpp"

namespace dca::coattention {

ad::Var similarity(ad::Var Hv, ad::Var Hx, ad::Var L) {
  const std::size_t d = L.rows();
  if (L.cols() != d || Hv.cols() != d || Hx.cols() != d) {
    throw DimensionError("similarity: Hv " + Hv.value().shape_string() + ", Hx " +
                         Hx.value().shape_string() + ", L " + L.value().shape_string());
  }
  return ad::matmul_nt(ad::matmul(Hv, L), ad::matmul(Hx, L));
}

Perspective co_attend(ad::Var Hv, ad::Var Hx, ad::Var L) {
  const ad::Var S = similarity(Hv, Hx, L);
  const ad::Var Ax = ad::softmax_rows(S);
  const ad::Var Av = ad::softmax_rows(ad::transpose(S));
  return {ad::matmul(Ax, Hx), ad::matmul(Av, Hv), S};
}

CoDependent dca_forward(ad::Var Hv, ad::Var Hx, std::span<const ad::Var> metrics) {
  if (metrics.empty()) throw DimensionError("dca_forward: need at least one perspective");
  std::vector<ad::Var> cx, cv;
  CoDependent out;
  for (const ad::Var& L : metrics) {
    Perspective p = co_attend(Hv, Hx, L);
    cx.push_back(p.Cx);
    cv.push_back(p.Cv);
    out.S.push_back(p.S);
  }
  out.Cx = ad::mean(cx);
  out.Cv = ad::mean(cv);
  return out;
}

std::vector<ad::Var> bind_metrics(ad::Tape& tape, const ModelConfig& cfg) {
  if (cfg.traditional) return {tape.constant(Matrix::identity(cfg.hidden))};
  std::vector<ad::Var> out;
  for (std::size_t k = 0; k < cfg.perspectives; ++k) out.push_back(tape.param(names::metric(k)));
  return out;
}

double mean_pairwise_correlation(std::span<const Matrix> S) {
  if (S.size() < 2) throw DimensionError("mean_pairwise_correlation: need two or more matrices");
  auto pearson = [](const Matrix& a, const Matrix& b) {
    check_shapes(a.same_shape(b), "pearson", a, b);
    const double n = static_cast<double>(a.data().size());
    const double ma = sum(a) / n, mb = sum(b) / n;
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) {
      const double x = a.data()[i] - ma, y = b.data()[i] - mb;
      cov += x * y;
      va += x * x;
      vb += y * y;
    }
    return va == 0.0 || vb == 0.0 ? 0.0 : cov / std::sqrt(va * vb);
  };
  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < S.size(); ++i) {
    for (std::size_t j = i + 1; j < S.size(); ++j, ++pairs) total += pearson(S[i], S[j]);
  }
  return total / static_cast<double>(pairs);
}

}  // namespace dca::coattention
