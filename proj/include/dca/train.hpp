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

#ifndef DCA_TRAIN_HPP_
#define DCA_TRAIN_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "dca/corpus.hpp"
#include "dca/decoder.hpp"
#include "dca/model.hpp"
#include "dca/optim.hpp"
#include "dca/ortho.hpp"
#include "dca/params.hpp"

namespace dca::train {

/// Fully resolved settings of one run. Keys of the flat config format are
/// listed next to each field.
struct RunConfig {
  std::size_t d = 64;         // d
  std::size_t d_f = 16;       // d_f
  std::size_t K = 3;          // K
  double lr = 3e-4;           // lr
  std::size_t epochs = 50;    // epochs
  double dropout = 0.1;       // dropout
  std::size_t batch = 16;     // batch
  std::uint64_t seed = 7;     // seed
  bool gam = true;            // gam.enabled
  bool traditional = false;   // dca.traditional
  ortho::OrthoConfig ortho;   // ortho.enabled, ortho.beta (alias beta), ortho.mode
  decoder::ScoreMode scoring = decoder::ScoreMode::kMean;  // scoring

  ModelConfig model(std::size_t vocab_size) const;
  AdamConfig adam() const;
};

/// Throws UsageError for an unknown key or an unparsable value.
void set_option(RunConfig& cfg, std::string_view key, std::string_view value);
/// Flat key=value lines; blank lines and '#' comments are skipped.
void apply_config_text(RunConfig& cfg, std::string_view text);
RunConfig load_config(const std::filesystem::path& path);
std::string to_config_text(const RunConfig& cfg);
void validate(const RunConfig& cfg);

struct SplitStats {
  double nll_per_token = 0.0;
  double accuracy = 0.0;  // teacher-forced argmax token accuracy
  std::size_t tokens = 0;
};

/// Evaluation-mode teacher-forced statistics over a split.
SplitStats teacher_forced_stats(const ParamStore& params, const ModelConfig& cfg,
                                const std::vector<corpus::Instance>& instances);

struct EpochLog {
  std::size_t epoch = 0;
  double train_nll = 0.0;  // running per-token loss during the epoch
  double dev_nll = 0.0;    // NaN when there is no dev split
  double r_beta = 0.0;     // regularizer value on the metrics after the epoch
};

/// Adam over per-token-averaged mini-batch losses, with the orthogonalization
/// post-update after every optimizer step when enabled.
class Trainer {
 public:
  Trainer(const RunConfig& cfg, std::size_t vocab_size);
  /// Continues from a checkpoint written by save_checkpoint.
  Trainer(const RunConfig& cfg, const NamedMatrices& checkpoint);

  const RunConfig& config() const { return cfg_; }
  const ModelConfig& model_config() const { return model_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }
  std::size_t epochs_done() const { return epoch_; }

  /// One pass over `train` in a seeded order. Throws NumericError naming the
  /// epoch and step on a non-finite loss.
  EpochLog run_epoch(const std::vector<corpus::Instance>& train,
                     const std::vector<corpus::Instance>& dev);

  /// Parameters, optimizer state and the epoch counter.
  NamedMatrices checkpoint() const;

 private:
  RunConfig cfg_;
  ModelConfig model_;
  ParamStore params_;
  std::size_t epoch_ = 0;
};

struct TrainOptions {
  /// Receives log.csv, config.txt, ckpt/epoch_NNN.bin and model.bin. Empty
  /// means nothing is written.
  std::filesystem::path out_dir;
  /// Checkpoint to continue from (empty: fresh start).
  std::filesystem::path resume;
  std::function<void(const EpochLog&)> on_epoch;
};

/// Trains up to cfg.epochs epochs and returns the final trainer.
Trainer run(const RunConfig& cfg, const corpus::Corpus& corpus, const TrainOptions& opts);

std::string log_header();
std::string log_rows(const EpochLog& entry);

std::filesystem::path epoch_checkpoint(const std::filesystem::path& out_dir, std::size_t epoch);

}  // namespace dca::train

#endif  // DCA_TRAIN_HPP_
