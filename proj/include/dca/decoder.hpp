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

#ifndef DCA_DECODER_HPP_
#define DCA_DECODER_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "dca/coattention.hpp"
#include "dca/corpus.hpp"
#include "dca/encoders.hpp"
#include "dca/fusion.hpp"
#include "dca/model.hpp"
#include "dca/params.hpp"
#include "dca/rng.hpp"
#include "dca/tape.hpp"

namespace dca::decoder {

using corpus::TokenId;

enum class ScoreMode { kMean, kSum };

std::string_view to_string(ScoreMode mode);
ScoreMode score_mode_from_string(std::string_view text);

/// Training-time noise. A null rng means evaluation (no dropout).
struct Noise {
  double dropout = 0.0;
  Rng* rng = nullptr;

  bool active() const { return rng != nullptr && dropout > 0.0; }
};

/// Encoder outputs, co-attention, and the prepared attention memories of one
/// instance: everything the decoder conditions on.
class Conditioning {
 public:
  Conditioning(ad::Tape& tape, const corpus::Instance& inst, const ModelConfig& cfg, Noise noise);

  const ModelConfig& config() const { return cfg_; }
  const enc::EncoderOutput& encoded() const { return enc_; }
  /// Present unless the GAM is switched off.
  const std::optional<coattention::CoDependent>& codependent() const { return co_; }

  /// Decoder context g_t for the previous decoder state.
  ad::Var context(ad::Var s_prev) const;

 private:
  ModelConfig cfg_;
  enc::EncoderOutput enc_;
  std::optional<coattention::CoDependent> co_;
  std::optional<fusion::GamParams> gam_;
  std::optional<fusion::GamMemory> gam_mem_;
  std::optional<fusion::PlainParams> plain_;
  std::optional<fusion::PlainMemory> plain_mem_;
};

struct DecodeState {
  ad::Var s;  // 1 x d
  std::size_t t = 0;
  std::vector<TokenId> emitted;
};

DecodeState initial_state(ad::Tape& tape, const ModelConfig& cfg);

struct DecoderParams {
  enc::Gru gru;
  ad::Var embed;
  ad::Var O;
  static DecoderParams bind(ad::Tape& tape);
};

struct StepOutput {
  ad::Var logits;  // 1 x V
  DecodeState state;
};

/// s_t = GRU(s_{t-1}, [e(y_{t-1}); g_t]); logits = s_t O. `emitted` is
/// extended with y_prev's successor by the caller, not here; t advances.
StepOutput decode_step(const DecoderParams& p, const DecodeState& state, TokenId y_prev,
                       ad::Var g_t, Noise noise = {});

struct TeacherForced {
  ad::Var loss;           // summed token NLL, 1x1
  std::size_t tokens = 0; // target length + 1 (EOS)
  std::size_t correct = 0;
};

/// Teacher-forced pass over BOS + target -> target + EOS from s_0 = 0, with
/// g_t recomputed from s_{t-1} at every step.
TeacherForced teacher_forced(ad::Tape& tape, const Conditioning& cond,
                             std::span<const TokenId> target, Noise noise = {});

/// Convenience: builds the conditioning on `tape` and returns the summed NLL.
/// Throws CorpusError for an empty target.
TeacherForced nll(ad::Tape& tape, const corpus::Instance& inst, const ModelConfig& cfg,
                  Noise noise = {});

/// Log-likelihood of a candidate (EOS included) under teacher forcing: the
/// per-token mean or the sum.
double score(const ParamStore& params, const corpus::Instance& inst, const ModelConfig& cfg,
             std::span<const TokenId> candidate, ScoreMode mode = ScoreMode::kMean);

/// Scores many candidates against one instance, sharing the encoder pass.
std::vector<double> score_all(const ParamStore& params, const corpus::Instance& inst,
                              const ModelConfig& cfg,
                              const std::vector<std::vector<TokenId>>& candidates,
                              ScoreMode mode = ScoreMode::kMean);

/// Greedy argmax decoding from BOS until EOS or max_len tokens; with a
/// sampler, draws each token from softmax(logits) instead.
std::vector<TokenId> generate(const ParamStore& params, const corpus::Instance& inst,
                              const ModelConfig& cfg, std::size_t max_len,
                              Rng* sampler = nullptr);

}  // namespace dca::decoder

#endif  // DCA_DECODER_HPP_
