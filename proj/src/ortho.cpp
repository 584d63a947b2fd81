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

#include "dca/ortho.hpp"

#include <cmath>

#include "dca/error.hpp"
#include "dca/model.hpp"

namespace dca::ortho {

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::kSimultaneous: return "simultaneous";
    case Mode::kSequential: return "sequential";
    case Mode::kLossTerm: return "loss-term";
  }
  return "?";
}

Mode mode_from_string(std::string_view text) {
  if (text == "simultaneous") return Mode::kSimultaneous;
  if (text == "sequential") return Mode::kSequential;
  if (text == "loss-term") return Mode::kLossTerm;
  throw UsageError("unknown ortho mode '" + std::string(text) +
                   "' (expected simultaneous|sequential|loss-term)");
}

Matrix gram(std::span<const Matrix> Ls) {
  const std::size_t K = Ls.size();
  Matrix G(K, K);
  for (std::size_t i = 0; i < K; ++i)
    for (std::size_t j = i; j < K; ++j) G(i, j) = G(j, i) = frobenius_dot(Ls[i], Ls[j]);
  return G;
}

double off_diagonal_mass(const Matrix& G) {
  double acc = 0.0;
  for (std::size_t i = 0; i < G.rows(); ++i)
    for (std::size_t j = 0; j < G.cols(); ++j)
      if (i != j) acc += std::abs(G(i, j));
  return acc;
}

double r_beta(std::span<const Matrix> Ls, double beta) {
  const Matrix G = gram(Ls);
  double acc = 0.0;
  for (std::size_t i = 0; i < G.rows(); ++i) {
    for (std::size_t j = 0; j < G.cols(); ++j) {
      const double dev = G(i, j) - (i == j ? 1.0 : 0.0);
      acc += dev * dev;
    }
  }
  return beta / 4.0 * acc;
}

Matrix r_beta_grad(std::span<const Matrix> Ls, double beta, std::size_t i) {
  Matrix g = -1.0 * Ls[i];
  for (const Matrix& Lk : Ls) g.add_scaled(Lk, frobenius_dot(Ls[i], Lk));
  g *= beta;
  return g;
}

namespace {

Matrix updated(std::span<const Matrix> Ls, double beta, std::size_t i) {
  Matrix out = (1.0 + beta) * Ls[i];
  for (const Matrix& Lk : Ls) out.add_scaled(Lk, -beta * frobenius_dot(Ls[i], Lk));
  return out;
}

}  // namespace

void ortho_update(std::vector<Matrix>& Ls, double beta, Mode mode) {
  if (mode == Mode::kLossTerm) return;
  if (mode == Mode::kSequential) {
    for (std::size_t i = 0; i < Ls.size(); ++i) Ls[i] = updated(Ls, beta, i);
    return;
  }
  std::vector<Matrix> next;
  next.reserve(Ls.size());
  for (std::size_t i = 0; i < Ls.size(); ++i) next.push_back(updated(Ls, beta, i));
  Ls = std::move(next);
}

ad::Var r_beta(std::span<const ad::Var> Ls, double beta) {
  if (Ls.empty()) throw DimensionError("r_beta: no metrics");
  ad::Tape& tape = *Ls.front().tape;
  ad::Var total = tape.constant(Matrix(1, 1));
  for (std::size_t i = 0; i < Ls.size(); ++i) {
    for (std::size_t j = 0; j < Ls.size(); ++j) {
      ad::Var dev = ad::frobenius_dot(Ls[i], Ls[j]);
      if (i == j) dev = ad::add_scalar(dev, -1.0);
      total = ad::add(total, ad::mul(dev, dev));
    }
  }
  return ad::scale(total, beta / 4.0);
}

std::vector<Matrix> metrics_of(const ParamStore& store) {
  std::vector<Matrix> Ls;
  for (const auto& name : metric_names(store)) Ls.push_back(store.value(name));
  return Ls;
}

void apply_post_update(ParamStore& store, const OrthoConfig& cfg) {
  if (!cfg.enabled || cfg.mode == Mode::kLossTerm) return;
  const auto names = metric_names(store);
  if (names.empty()) return;
  std::vector<Matrix> Ls = metrics_of(store);
  ortho_update(Ls, cfg.beta, cfg.mode);
  for (std::size_t k = 0; k < names.size(); ++k) store.value(names[k]) = std::move(Ls[k]);
}

double accumulate_regularizer(const ParamStore& store, double beta, Gradients& sink) {
  const auto names = metric_names(store);
  if (names.empty()) return 0.0;
  ad::Tape tape(store, &sink);
  std::vector<ad::Var> Ls;
  for (const auto& n : names) Ls.push_back(tape.param(n));
  const ad::Var R = r_beta(Ls, beta);
  tape.backward(R);
  return R.scalar();
}

}  // namespace dca::ortho
