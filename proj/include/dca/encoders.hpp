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

#ifndef DCA_ENCODERS_HPP_
#define DCA_ENCODERS_HPP_

#include <cstddef>
#include <string>

#include "dca/corpus.hpp"
#include "dca/model.hpp"
#include "dca/params.hpp"
#include "dca/rng.hpp"
#include "dca/tape.hpp"

namespace dca::enc {

/// GRU weights as tape leaves. Gate matrices act on the row [h, x]:
///   r  = sigmoid([h, x] Wr + br)
///   z  = sigmoid([h, x] Wz + bz)
///   hc = tanh([r * h, x] Wh + bh)
///   h' = (1 - z) * h + z * hc
struct Gru {
  ad::Var Wr, br, Wz, bz, Wh, bh;

  /// Binds "<prefix>.Wr" ... "<prefix>.bh".
  static Gru bind(ad::Tape& tape, const std::string& prefix);
};

/// Adds a GRU's parameters ((hidden + input) x hidden gates, zero biases).
void register_gru(ParamStore& store, const std::string& prefix, std::size_t input,
                  std::size_t hidden, Rng& rng);

ad::Var gru_cell(const Gru& gru, ad::Var h_prev, ad::Var input);

struct EncoderOutput {
  ad::Var Hv;  // n x d
  ad::Var Hx;  // m x d
};

/// Runs the frame GRU over projected frames and the text GRU over embedded
/// context tokens, both from a zero state. Row i of each output is the hidden
/// state after step i. Dropout (inverted) is applied to the token embeddings
/// and to both outputs when `dropout_rng` is non-null.
EncoderOutput encode(ad::Tape& tape, const corpus::Instance& inst, const ModelConfig& cfg,
                     double dropout, Rng* dropout_rng);

}  // namespace dca::enc

#endif  // DCA_ENCODERS_HPP_
