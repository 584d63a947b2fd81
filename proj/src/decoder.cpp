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

#include "dca/decoder.hpp"

#include <cmath>
#include <string>

#include "dca/error.hpp"

namespace dca::decoder {

std::string_view to_string(ScoreMode mode) { return mode == ScoreMode::kSum ? "sum" : "mean"; }

ScoreMode score_mode_from_string(std::string_view text) {
  if (text == "mean") return ScoreMode::kMean;
  if (text == "sum") return ScoreMode::kSum;
  throw UsageError("unknown scoring mode '" + std::string(text) + "' (expected mean|sum)");
}

Conditioning::Conditioning(ad::Tape& tape, const corpus::Instance& inst, const ModelConfig& cfg,
                           Noise noise)
    : cfg_(cfg), enc_(enc::encode(tape, inst, cfg, noise.dropout, noise.rng)) {
  if (cfg.gam) {
    const std::vector<ad::Var> metrics = coattention::bind_metrics(tape, cfg);
    co_ = coattention::dca_forward(enc_.Hv, enc_.Hx, metrics);
    gam_ = fusion::GamParams::bind(tape);
    gam_mem_ = fusion::prepare(*gam_, co_->Cx, enc_.Hx, co_->Cv, enc_.Hv);
  } else {
    plain_ = fusion::PlainParams::bind(tape);
    plain_mem_ = fusion::prepare(*plain_, enc_.Hx, enc_.Hv);
  }
}

ad::Var Conditioning::context(ad::Var s_prev) const {
  if (gam_) return fusion::context(*gam_, s_prev, *gam_mem_);
  return fusion::plain_context(*plain_, s_prev, *plain_mem_);
}

DecodeState initial_state(ad::Tape& tape, const ModelConfig& cfg) {
  return {tape.constant(Matrix(1, cfg.hidden)), 0, {}};
}

DecoderParams DecoderParams::bind(ad::Tape& tape) {
  return {enc::Gru::bind(tape, names::kDecoderGru), tape.param(names::kEmbed),
          tape.param(names::kOutput)};
}

StepOutput decode_step(const DecoderParams& p, const DecodeState& state, TokenId y_prev,
                       ad::Var g_t, Noise noise) {
  const TokenId ids[] = {y_prev};
  ad::Var e = ad::gather_rows(p.embed, ids);
  if (noise.active()) e = ad::dropout(e, noise.dropout, *noise.rng);
  const ad::Var s = enc::gru_cell(p.gru, state.s, ad::concat_cols(e, g_t));
  return {ad::matmul(s, p.O), DecodeState{s, state.t + 1, state.emitted}};
}

namespace {

std::size_t argmax(const Matrix& row) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < row.cols(); ++j) {
    if (row[j] > row[best]) best = j;
  }
  return best;
}

std::size_t sample(const Matrix& logits, Rng& rng) {
  const Matrix p = softmax_rows(logits);
  double u = rng.uniform();
  for (std::size_t j = 0; j < p.cols(); ++j) {
    u -= p[j];
    if (u < 0.0) return j;
  }
  return p.cols() - 1;
}

}  // namespace

TeacherForced teacher_forced(ad::Tape& tape, const Conditioning& cond,
                             std::span<const TokenId> target, Noise noise) {
  if (target.empty()) throw CorpusError("nll: empty target sequence");
  const DecoderParams p = DecoderParams::bind(tape);
  DecodeState state = initial_state(tape, cond.config());
  TeacherForced out;
  TokenId prev = corpus::kBos;
  for (std::size_t t = 0; t <= target.size(); ++t) {
    const TokenId gold = t < target.size() ? target[t] : corpus::kEos;
    StepOutput step = decode_step(p, state, prev, cond.context(state.s), noise);
    const ad::Var term = ad::nll(step.logits, gold);
    out.loss = t == 0 ? term : ad::add(out.loss, term);
    if (argmax(step.logits.value()) == gold) ++out.correct;
    state = std::move(step.state);
    state.emitted.push_back(gold);
    prev = gold;
  }
  out.tokens = target.size() + 1;
  return out;
}

TeacherForced nll(ad::Tape& tape, const corpus::Instance& inst, const ModelConfig& cfg,
                  Noise noise) {
  const Conditioning cond(tape, inst, cfg, noise);
  return teacher_forced(tape, cond, inst.target, noise);
}

namespace {

double to_score(const TeacherForced& tf, ScoreMode mode) {
  const double ll = -tf.loss.scalar();
  return mode == ScoreMode::kSum ? ll : ll / static_cast<double>(tf.tokens);
}

}  // namespace

double score(const ParamStore& params, const corpus::Instance& inst, const ModelConfig& cfg,
             std::span<const TokenId> candidate, ScoreMode mode) {
  ad::Tape tape(params);
  const Conditioning cond(tape, inst, cfg, {});
  return to_score(teacher_forced(tape, cond, candidate), mode);
}

std::vector<double> score_all(const ParamStore& params, const corpus::Instance& inst,
                              const ModelConfig& cfg,
                              const std::vector<std::vector<TokenId>>& candidates,
                              ScoreMode mode) {
  ad::Tape tape(params);
  const Conditioning cond(tape, inst, cfg, {});
  const std::size_t mark = tape.mark();
  std::vector<double> out;
  out.reserve(candidates.size());
  for (const auto& cand : candidates) {
    out.push_back(to_score(teacher_forced(tape, cond, cand), mode));
    tape.rewind(mark);
  }
  return out;
}

std::vector<TokenId> generate(const ParamStore& params, const corpus::Instance& inst,
                              const ModelConfig& cfg, std::size_t max_len, Rng* sampler) {
  if (max_len == 0) throw UsageError("generate: max_len must be at least 1");
  ad::Tape tape(params);
  const Conditioning cond(tape, inst, cfg, {});
  const DecoderParams p = DecoderParams::bind(tape);
  DecodeState state = initial_state(tape, cfg);
  TokenId prev = corpus::kBos;
  while (state.emitted.size() < max_len) {
    StepOutput step = decode_step(p, state, prev, cond.context(state.s));
    const Matrix& logits = step.logits.value();
    const TokenId next = sampler != nullptr ? sample(logits, *sampler) : argmax(logits);
    if (next == corpus::kEos) break;
    state = std::move(step.state);
    state.emitted.push_back(next);
    prev = next;
  }
  return state.emitted;
}

}  // namespace dca::decoder
