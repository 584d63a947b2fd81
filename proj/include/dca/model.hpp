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

#ifndef DCA_MODEL_HPP_
#define DCA_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "dca/params.hpp"

namespace dca {

/// Architecture of one model. Everything here is recoverable from the
/// parameter shapes in a checkpoint (see infer_model_config).
struct ModelConfig {
  std::size_t vocab_size = 0;
  std::size_t frame_dim = 16;
  std::size_t hidden = 64;
  std::size_t perspectives = 3;
  /// Gated attention module; when off, the decoder context is an FFN over
  /// plain attention on the encoder outputs and the co-attention is unused.
  bool gam = true;
  /// Single perspective with the metric fixed to the identity (plain
  /// inner-product co-attention).
  bool traditional = false;
};

/// Parameter names. Kept in one place because checkpoints depend on them.
namespace names {
inline constexpr const char* kEmbed = "embed";
inline constexpr const char* kFrameW = "enc.frame.W";
inline constexpr const char* kFrameB = "enc.frame.b";
inline constexpr const char* kVideoGru = "enc.video";
inline constexpr const char* kTextGru = "enc.text";
inline constexpr const char* kDecoderGru = "dec.gru";
inline constexpr const char* kOutput = "dec.O";
inline constexpr const char* kAlpha = "gam.alpha";
inline constexpr const char* kFfn = "gam.ffn";
inline constexpr const char* kPlainFfn = "plain.ffn";
std::string metric(std::size_t k);  // "dca.L<k>"
}  // namespace names

/// Registers and initializes every parameter the configuration uses.
/// Weight matrices (the metrics included): uniform(+-sqrt(6/(fan_in+fan_out)));
/// biases zero; embeddings uniform(+-0.1); the GAM balance vector alpha ones.
ParamStore init_params(const ModelConfig& cfg, std::uint64_t seed);

ModelConfig infer_model_config(const ParamStore& store);

/// Names of the learnable metric matrices, in perspective order (empty for a
/// traditional or GAM-less model).
std::vector<std::string> metric_names(const ParamStore& store);

}  // namespace dca

#endif  // DCA_MODEL_HPP_
