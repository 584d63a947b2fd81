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

#ifndef DCA_FUSION_HPP_
#define DCA_FUSION_HPP_

#include <cstddef>
#include <string>

#include "dca/params.hpp"
#include "dca/rng.hpp"
#include "dca/tape.hpp"

namespace dca::fusion {

/// Additive attention: e_j = w . tanh(q Wq + m_j Wm), weights = softmax(e),
/// output = sum_j weights_j m_j.
struct Attention {
  ad::Var Wq, Wm, w;
  static Attention bind(ad::Tape& tape, const std::string& prefix);
};

void register_attention(ParamStore& store, const std::string& prefix, std::size_t d, Rng& rng);

/// Memory rows with their query-independent projection m_j Wm cached, so a
/// decoder can attend to the same memory at every step.
struct Memory {
  ad::Var rows;  // r x d
  ad::Var keys;  // r x d
};

Memory prepare(const Attention& att, ad::Var rows);
ad::Var attend(const Attention& att, ad::Var query, const Memory& memory);
ad::Var attend(const Attention& att, ad::Var query, ad::Var memory);

/// w = sigmoid(c Uc + h Uh + b); output w * c + (1 - w) * h.
struct Gate {
  ad::Var Uc, Uh, b;
  static Gate bind(ad::Tape& tape, const std::string& prefix);
};

void register_gate(ParamStore& store, const std::string& prefix, std::size_t d, Rng& rng);
ad::Var gate(ad::Var c_hat, ad::Var h_hat, const Gate& g);

/// tanh(x W1 + b1) W2 + b2.
struct Ffn {
  ad::Var W1, b1, W2, b2;
  static Ffn bind(ad::Tape& tape, const std::string& prefix);
};

void register_ffn(ParamStore& store, const std::string& prefix, std::size_t in, std::size_t d,
                  Rng& rng);
ad::Var ffn(const Ffn& f, ad::Var x);

/// Gated attention module: balances co-dependent against original states per
/// modality, then fuses the two modalities by an outer product.
struct GamParams {
  Attention cx, hx, cv, hv;
  Gate gx, gv;
  ad::Var alpha;
  Ffn ffn;
  static GamParams bind(ad::Tape& tape);
};

/// Registers every GAM parameter for hidden size d.
void register_gam(ParamStore& store, std::size_t d, Rng& rng);

struct GamMemory {
  Memory cx, hx, cv, hv;
};

GamMemory prepare(const GamParams& p, ad::Var Cx, ad::Var Hx, ad::Var Cv, ad::Var Hv);

/// g_t = FFN(flatten(r_x (outer) (alpha * r_v))), flattened row-major.
ad::Var context(const GamParams& p, ad::Var s_prev, const GamMemory& mem);
ad::Var context(const GamParams& p, ad::Var s_prev, ad::Var Cx, ad::Var Hx, ad::Var Cv,
                ad::Var Hv);

/// Replacement used when the GAM is switched off: attention over the encoder
/// outputs only, concatenated and passed through a 2d -> d FFN.
struct PlainParams {
  Attention hx, hv;
  Ffn ffn;
  static PlainParams bind(ad::Tape& tape);
};

void register_plain(ParamStore& store, std::size_t d, Rng& rng);

struct PlainMemory {
  Memory hx, hv;
};

PlainMemory prepare(const PlainParams& p, ad::Var Hx, ad::Var Hv);
ad::Var plain_context(const PlainParams& p, ad::Var s_prev, const PlainMemory& mem);

}  // namespace dca::fusion

#endif  // DCA_FUSION_HPP_
