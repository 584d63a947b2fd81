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

#include "dca/fusion.hpp"

#include "dca/error.hpp"
#include "dca/model.hpp"

namespace dca::fusion {

Attention Attention::bind(ad::Tape& tape, const std::string& prefix) {
  return {tape.param(prefix + ".Wq"), tape.param(prefix + ".Wm"), tape.param(prefix + ".w")};
}

void register_attention(ParamStore& store, const std::string& prefix, std::size_t d, Rng& rng) {
  store.add(prefix + ".Wq", glorot_uniform(d, d, rng));
  store.add(prefix + ".Wm", glorot_uniform(d, d, rng));
  store.add(prefix + ".w", glorot_uniform(d, 1, rng));
}

Memory prepare(const Attention& att, ad::Var rows) {
  if (rows.rows() == 0) throw DimensionError("attend: empty memory");
  return {rows, ad::matmul(rows, att.Wm)};
}

ad::Var attend(const Attention& att, ad::Var query, const Memory& memory) {
  const ad::Var pre = ad::add_row(memory.keys, ad::matmul(query, att.Wq));
  const ad::Var scores = ad::matmul(ad::tanh(pre), att.w);  // r x 1
  const ad::Var weights = ad::softmax_rows(ad::transpose(scores));
  return ad::matmul(weights, memory.rows);
}

ad::Var attend(const Attention& att, ad::Var query, ad::Var memory) {
  return attend(att, query, prepare(att, memory));
}

Gate Gate::bind(ad::Tape& tape, const std::string& prefix) {
  return {tape.param(prefix + ".Uc"), tape.param(prefix + ".Uh"), tape.param(prefix + ".b")};
}

void register_gate(ParamStore& store, const std::string& prefix, std::size_t d, Rng& rng) {
  store.add(prefix + ".Uc", glorot_uniform(d, d, rng));
  store.add(prefix + ".Uh", glorot_uniform(d, d, rng));
  store.add(prefix + ".b", Matrix(1, d));
}

ad::Var gate(ad::Var c_hat, ad::Var h_hat, const Gate& g) {
  const ad::Var w =
      ad::sigmoid(ad::add(ad::add(ad::matmul(c_hat, g.Uc), ad::matmul(h_hat, g.Uh)), g.b));
  return ad::add(ad::mul(w, c_hat), ad::mul(ad::one_minus(w), h_hat));
}

Ffn Ffn::bind(ad::Tape& tape, const std::string& prefix) {
  return {tape.param(prefix + ".W1"), tape.param(prefix + ".b1"), tape.param(prefix + ".W2"),
          tape.param(prefix + ".b2")};
}

void register_ffn(ParamStore& store, const std::string& prefix, std::size_t in, std::size_t d,
                  Rng& rng) {
  store.add(prefix + ".W1", glorot_uniform(in, d, rng));
  store.add(prefix + ".b1", Matrix(1, d));
  store.add(prefix + ".W2", glorot_uniform(d, d, rng));
  store.add(prefix + ".b2", Matrix(1, d));
}

ad::Var ffn(const Ffn& f, ad::Var x) {
  const ad::Var h = ad::tanh(ad::add(ad::matmul(x, f.W1), f.b1));
  return ad::add(ad::matmul(h, f.W2), f.b2);
}

GamParams GamParams::bind(ad::Tape& tape) {
  return {Attention::bind(tape, "gam.att.cx"), Attention::bind(tape, "gam.att.hx"),
          Attention::bind(tape, "gam.att.cv"), Attention::bind(tape, "gam.att.hv"),
          Gate::bind(tape, "gam.gate.x"),      Gate::bind(tape, "gam.gate.v"),
          tape.param(names::kAlpha),           Ffn::bind(tape, names::kFfn)};
}

void register_gam(ParamStore& store, std::size_t d, Rng& rng) {
  for (const char* which : {"cx", "hx", "cv", "hv"}) {
    register_attention(store, std::string("gam.att.") + which, d, rng);
  }
  register_gate(store, "gam.gate.x", d, rng);
  register_gate(store, "gam.gate.v", d, rng);
  store.add(names::kAlpha, Matrix(1, d, 1.0));
  register_ffn(store, names::kFfn, d * d, d, rng);
}

GamMemory prepare(const GamParams& p, ad::Var Cx, ad::Var Hx, ad::Var Cv, ad::Var Hv) {
  return {prepare(p.cx, Cx), prepare(p.hx, Hx), prepare(p.cv, Cv), prepare(p.hv, Hv)};
}

ad::Var context(const GamParams& p, ad::Var s_prev, const GamMemory& mem) {
  const ad::Var rx = gate(attend(p.cx, s_prev, mem.cx), attend(p.hx, s_prev, mem.hx), p.gx);
  const ad::Var rv = gate(attend(p.cv, s_prev, mem.cv), attend(p.hv, s_prev, mem.hv), p.gv);
  return ffn(p.ffn, ad::outer_flat(rx, ad::mul(p.alpha, rv)));
}

ad::Var context(const GamParams& p, ad::Var s_prev, ad::Var Cx, ad::Var Hx, ad::Var Cv,
                ad::Var Hv) {
  return context(p, s_prev, prepare(p, Cx, Hx, Cv, Hv));
}

PlainParams PlainParams::bind(ad::Tape& tape) {
  return {Attention::bind(tape, "plain.att.hx"), Attention::bind(tape, "plain.att.hv"),
          Ffn::bind(tape, names::kPlainFfn)};
}

void register_plain(ParamStore& store, std::size_t d, Rng& rng) {
  register_attention(store, "plain.att.hx", d, rng);
  register_attention(store, "plain.att.hv", d, rng);
  register_ffn(store, names::kPlainFfn, 2 * d, d, rng);
}

PlainMemory prepare(const PlainParams& p, ad::Var Hx, ad::Var Hv) {
  return {prepare(p.hx, Hx), prepare(p.hv, Hv)};
}

ad::Var plain_context(const PlainParams& p, ad::Var s_prev, const PlainMemory& mem) {
  return ffn(p.ffn, ad::concat_cols(attend(p.hx, s_prev, mem.hx), attend(p.hv, s_prev, mem.hv)));
}

}  // namespace dca::fusion
