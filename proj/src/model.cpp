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

#include "dca/model.hpp"

#include "dca/encoders.hpp"
#include "dca/error.hpp"
#include "dca/fusion.hpp"

namespace dca {

std::string names::metric(std::size_t k) { return "dca.L" + std::to_string(k); }

ParamStore init_params(const ModelConfig& cfg, std::uint64_t seed) {
  if (cfg.vocab_size <= corpus::kNumReserved || cfg.hidden == 0 || cfg.frame_dim == 0) {
    throw UsageError("init_params: vocabulary, hidden size and frame dimension must be set");
  }
  if (cfg.perspectives == 0) throw UsageError("init_params: need at least one perspective");
  const std::size_t d = cfg.hidden;
  Rng rng(seed);
  ParamStore store;
  store.add(names::kEmbed, uniform_matrix(cfg.vocab_size, d, 0.1, rng));
  store.add(names::kFrameW, glorot_uniform(cfg.frame_dim, d, rng));
  store.add(names::kFrameB, Matrix(1, d));
  enc::register_gru(store, names::kVideoGru, d, d, rng);
  enc::register_gru(store, names::kTextGru, d, d, rng);
  if (cfg.gam) {
    if (!cfg.traditional) {
      for (std::size_t k = 0; k < cfg.perspectives; ++k) {
        store.add(names::metric(k), glorot_uniform(d, d, rng));
      }
    }
    fusion::register_gam(store, d, rng);
  } else {
    fusion::register_plain(store, d, rng);
  }
  enc::register_gru(store, names::kDecoderGru, 2 * d, d, rng);
  store.add(names::kOutput, glorot_uniform(d, cfg.vocab_size, rng));
  return store;
}

ModelConfig infer_model_config(const ParamStore& store) {
  ModelConfig cfg;
  const Matrix& embed = store.value(names::kEmbed);
  cfg.vocab_size = embed.rows();
  cfg.hidden = embed.cols();
  cfg.frame_dim = store.value(names::kFrameW).rows();
  cfg.gam = store.contains(names::kAlpha);
  const auto metrics = metric_names(store);
  cfg.traditional = cfg.gam && metrics.empty();
  cfg.perspectives = metrics.empty() ? 1 : metrics.size();
  return cfg;
}

std::vector<std::string> metric_names(const ParamStore& store) {
  std::vector<std::string> out;
  for (std::size_t k = 0; store.contains(names::metric(k)); ++k) out.push_back(names::metric(k));
  return out;
}

}  // namespace dca
