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

#include "dca/encoders.hpp"

#include <vector>

#include "dca/error.hpp"

namespace dca::enc {

Gru Gru::bind(ad::Tape& tape, const std::string& prefix) {
  return Gru{tape.param(prefix + ".Wr"), tape.param(prefix + ".br"),
             tape.param(prefix + ".Wz"), tape.param(prefix + ".bz"),
             tape.param(prefix + ".Wh"), tape.param(prefix + ".bh")};
}

void register_gru(ParamStore& store, const std::string& prefix, std::size_t input,
                  std::size_t hidden, Rng& rng) {
  for (const char* gate : {"r", "z", "h"}) {
    store.add(prefix + ".W" + gate, glorot_uniform(hidden + input, hidden, rng));
    store.add(prefix + ".b" + gate, Matrix(1, hidden));
  }
}

ad::Var gru_cell(const Gru& gru, ad::Var h_prev, ad::Var input) {
  const std::size_t d = gru.br.cols();
  if (h_prev.rows() != 1 || h_prev.cols() != d || input.rows() != 1 ||
      gru.Wr.rows() != d + input.cols()) {
    throw DimensionError("gru_cell: state " + h_prev.value().shape_string() + ", input " +
                         input.value().shape_string() + ", gate " +
                         gru.Wr.value().shape_string());
  }
  const ad::Var hx = ad::concat_cols(h_prev, input);
  const ad::Var r = ad::sigmoid(ad::add(ad::matmul(hx, gru.Wr), gru.br));
  const ad::Var z = ad::sigmoid(ad::add(ad::matmul(hx, gru.Wz), gru.bz));
  const ad::Var rh = ad::concat_cols(ad::mul(r, h_prev), input);
  const ad::Var cand = ad::tanh(ad::add(ad::matmul(rh, gru.Wh), gru.bh));
  return ad::add(ad::mul(ad::one_minus(z), h_prev), ad::mul(z, cand));
}

namespace {

ad::Var run_gru(ad::Tape& tape, const Gru& gru, ad::Var inputs, std::size_t hidden) {
  ad::Var h = tape.constant(Matrix(1, hidden));
  std::vector<ad::Var> states;
  states.reserve(inputs.rows());
  for (std::size_t i = 0; i < inputs.rows(); ++i) {
    h = gru_cell(gru, h, ad::row(inputs, i));
    states.push_back(h);
  }
  return ad::stack_rows(states);
}

}  // namespace

EncoderOutput encode(ad::Tape& tape, const corpus::Instance& inst, const ModelConfig& cfg,
                     double dropout, Rng* dropout_rng) {
  const bool drop = dropout_rng != nullptr && dropout > 0.0;
  const ad::Var frames = tape.constant(inst.frames);
  const ad::Var proj = ad::add_row(ad::matmul(frames, tape.param(names::kFrameW)),
                                   tape.param(names::kFrameB));
  ad::Var Hv = run_gru(tape, Gru::bind(tape, names::kVideoGru), proj, cfg.hidden);

  ad::Var emb = ad::gather_rows(tape.param(names::kEmbed), inst.context);
  if (drop) emb = ad::dropout(emb, dropout, *dropout_rng);
  ad::Var Hx = run_gru(tape, Gru::bind(tape, names::kTextGru), emb, cfg.hidden);

  if (drop) {
    Hv = ad::dropout(Hv, dropout, *dropout_rng);
    Hx = ad::dropout(Hx, dropout, *dropout_rng);
  }
  return {Hv, Hx};
}

}  // namespace dca::enc
