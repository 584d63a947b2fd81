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

#include "dca/train.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "dca/error.hpp"
#include "dca/rng.hpp"

namespace dca::train {

ModelConfig RunConfig::model(std::size_t vocab_size) const {
  ModelConfig m;
  m.vocab_size = vocab_size;
  m.frame_dim = d_f;
  m.hidden = d;
  m.perspectives = traditional ? 1 : K;
  m.gam = gam;
  m.traditional = traditional;
  return m;
}

AdamConfig RunConfig::adam() const {
  AdamConfig a;
  a.lr = lr;
  return a;
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw UsageError("invalid value '" + std::string(value) + "' for " + std::string(key));
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "on" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "off" || value == "no") return false;
  throw UsageError("invalid boolean '" + std::string(value) + "' for " + std::string(key));
}

/// Shortest text that reads back to the same double.
std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

void set_option(RunConfig& cfg, std::string_view key, std::string_view raw) {
  const std::string value = trim(raw);
  if (key == "d") {
    cfg.d = parse_number<std::size_t>(key, value);
  } else if (key == "d_f") {
    cfg.d_f = parse_number<std::size_t>(key, value);
  } else if (key == "K") {
    cfg.K = parse_number<std::size_t>(key, value);
  } else if (key == "beta" || key == "ortho.beta") {
    cfg.ortho.beta = parse_number<double>(key, value);
  } else if (key == "lr") {
    cfg.lr = parse_number<double>(key, value);
  } else if (key == "epochs") {
    cfg.epochs = parse_number<std::size_t>(key, value);
  } else if (key == "dropout") {
    cfg.dropout = parse_number<double>(key, value);
  } else if (key == "batch") {
    cfg.batch = parse_number<std::size_t>(key, value);
  } else if (key == "seed") {
    cfg.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "gam.enabled") {
    cfg.gam = parse_bool(key, value);
  } else if (key == "dca.traditional") {
    cfg.traditional = parse_bool(key, value);
  } else if (key == "ortho.enabled") {
    cfg.ortho.enabled = parse_bool(key, value);
  } else if (key == "ortho.mode") {
    cfg.ortho.mode = ortho::mode_from_string(value);
  } else if (key == "scoring") {
    cfg.scoring = decoder::score_mode_from_string(value);
  } else {
    throw UsageError("unknown config key '" + std::string(key) + "'");
  }
}

void apply_config_text(RunConfig& cfg, std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    set_option(cfg, trim(std::string_view(t).substr(0, eq)), std::string_view(t).substr(eq + 1));
  }
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  RunConfig cfg;
  apply_config_text(cfg, ss.str());
  return cfg;
}

std::string to_config_text(const RunConfig& cfg) {
  std::ostringstream out;
  out << "d=" << cfg.d << "\n"
      << "d_f=" << cfg.d_f << "\n"
      << "K=" << cfg.K << "\n"
      << "lr=" << format_double(cfg.lr) << "\n"
      << "epochs=" << cfg.epochs << "\n"
      << "dropout=" << format_double(cfg.dropout) << "\n"
      << "batch=" << cfg.batch << "\n"
      << "seed=" << cfg.seed << "\n"
      << "gam.enabled=" << (cfg.gam ? "true" : "false") << "\n"
      << "dca.traditional=" << (cfg.traditional ? "true" : "false") << "\n"
      << "ortho.enabled=" << (cfg.ortho.enabled ? "true" : "false") << "\n"
      << "ortho.beta=" << format_double(cfg.ortho.beta) << "\n"
      << "ortho.mode=" << ortho::to_string(cfg.ortho.mode) << "\n"
      << "scoring=" << decoder::to_string(cfg.scoring) << "\n";
  return out.str();
}

void validate(const RunConfig& cfg) {
  if (cfg.d == 0 || cfg.d_f == 0) throw UsageError("d and d_f must be positive");
  if (cfg.K == 0) throw UsageError("K must be at least 1");
  if (cfg.batch == 0) throw UsageError("batch must be at least 1");
  if (!(cfg.lr > 0.0)) throw UsageError("lr must be positive");
  if (!(cfg.dropout >= 0.0 && cfg.dropout < 1.0)) throw UsageError("dropout must be in [0, 1)");
  if (!(cfg.ortho.beta >= 0.0)) throw UsageError("ortho.beta must be non-negative");
}

SplitStats teacher_forced_stats(const ParamStore& params, const ModelConfig& cfg,
                                const std::vector<corpus::Instance>& instances) {
  SplitStats stats;
  double loss = 0.0;
  std::size_t correct = 0;
  for (const auto& inst : instances) {
    ad::Tape tape(params);
    const decoder::TeacherForced tf = decoder::nll(tape, inst, cfg);
    loss += tf.loss.scalar();
    correct += tf.correct;
    stats.tokens += tf.tokens;
  }
  if (stats.tokens > 0) {
    stats.nll_per_token = loss / static_cast<double>(stats.tokens);
    stats.accuracy = static_cast<double>(correct) / static_cast<double>(stats.tokens);
  }
  return stats;
}

Trainer::Trainer(const RunConfig& cfg, std::size_t vocab_size)
    : cfg_(cfg), model_(cfg.model(vocab_size)) {
  validate(cfg_);
  params_ = init_params(model_, cfg_.seed);
}

Trainer::Trainer(const RunConfig& cfg, const NamedMatrices& checkpoint) : cfg_(cfg) {
  validate(cfg_);
  params_ = import_store(checkpoint);
  model_ = infer_model_config(params_);
  for (const auto& [name, m] : checkpoint) {
    if (name == "meta/epoch") epoch_ = static_cast<std::size_t>(m[0]);
  }
}

EpochLog Trainer::run_epoch(const std::vector<corpus::Instance>& train,
                            const std::vector<corpus::Instance>& dev) {
  if (train.empty()) throw CorpusError("training split is empty");
  const std::size_t epoch = ++epoch_;
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  Rng shuffler = Rng::derive(cfg_.seed, epoch, std::numeric_limits<std::uint64_t>::max());
  shuffler.shuffle(order);

  const bool loss_term = cfg_.ortho.enabled && cfg_.ortho.mode == ortho::Mode::kLossTerm;
  double epoch_loss = 0.0;
  std::size_t epoch_tokens = 0;
  std::size_t step = 0;
  for (std::size_t start = 0; start < order.size(); start += cfg_.batch, ++step) {
    const std::size_t end = std::min(order.size(), start + cfg_.batch);
    std::size_t batch_tokens = 0;
    for (std::size_t i = start; i < end; ++i) batch_tokens += train[order[i]].target.size() + 1;

    Rng noise_rng = Rng::derive(cfg_.seed, epoch, step);
    const decoder::Noise noise{cfg_.dropout, &noise_rng};
    params_.zero_grad();
    for (std::size_t i = start; i < end; ++i) {
      ad::Tape tape(params_, &params_.grads());
      const decoder::TeacherForced tf = decoder::nll(tape, train[order[i]], model_, noise);
      const double loss = tf.loss.scalar();
      if (!std::isfinite(loss)) {
        throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + ", step " +
                           std::to_string(step) + " (instance " + train[order[i]].id + ")");
      }
      tape.backward(tf.loss, 1.0 / static_cast<double>(batch_tokens));
      epoch_loss += loss;
      epoch_tokens += tf.tokens;
    }
    if (loss_term) ortho::accumulate_regularizer(params_, cfg_.ortho.beta, params_.grads());
    try {
      adam_step(params_, cfg_.adam());
    } catch (const NumericError& e) {
      throw NumericError(std::string(e.what()) + " at epoch " + std::to_string(epoch) +
                         ", step " + std::to_string(step));
    }
    ortho::apply_post_update(params_, cfg_.ortho);
  }

  EpochLog log;
  log.epoch = epoch;
  log.train_nll = epoch_loss / static_cast<double>(epoch_tokens);
  log.dev_nll = dev.empty() ? std::numeric_limits<double>::quiet_NaN()
                            : teacher_forced_stats(params_, model_, dev).nll_per_token;
  log.r_beta = ortho::r_beta(ortho::metrics_of(params_), cfg_.ortho.beta);
  return log;
}

NamedMatrices Trainer::checkpoint() const {
  NamedMatrices out = export_store(params_, true);
  out.emplace_back("meta/epoch", Matrix(1, 1, static_cast<double>(epoch_)));
  return out;
}

std::string log_header() { return "epoch,split,nll_per_token,r_beta\n"; }

std::string log_rows(const EpochLog& entry) {
  std::string out;
  const std::string r = format_double(entry.r_beta);
  out += std::to_string(entry.epoch) + ",train," + format_double(entry.train_nll) + "," + r + "\n";
  if (!std::isnan(entry.dev_nll)) {
    out += std::to_string(entry.epoch) + ",dev," + format_double(entry.dev_nll) + "," + r + "\n";
  }
  return out;
}

std::filesystem::path epoch_checkpoint(const std::filesystem::path& out_dir, std::size_t epoch) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "epoch_%03zu.bin", epoch);
  return out_dir / "ckpt" / buf;
}

namespace {

/// Keeps the header and the rows of epochs <= `epochs` of an existing log.
std::string truncated_log(const std::filesystem::path& path, std::size_t epochs) {
  std::string out = log_header();
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::size_t e = 0;
    const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), e);
    if (ec == std::errc() && e <= epochs) out += line + "\n";
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

}  // namespace

Trainer run(const RunConfig& cfg, const corpus::Corpus& corpus, const TrainOptions& opts) {
  if (!corpus.train.empty() && corpus.train.front().frame_dim() != cfg.d_f) {
    throw UsageError("d_f=" + std::to_string(cfg.d_f) + " but the corpus has frame dimension " +
                     std::to_string(corpus.train.front().frame_dim()));
  }
  Trainer trainer = opts.resume.empty() ? Trainer(cfg, corpus.vocab.size())
                                        : Trainer(cfg, read_checkpoint(opts.resume));
  if (trainer.model_config().vocab_size != corpus.vocab.size()) {
    throw UsageError("checkpoint vocabulary does not match the corpus");
  }

  const bool write = !opts.out_dir.empty();
  const auto log_path = opts.out_dir / "log.csv";
  if (write) {
    std::filesystem::create_directories(opts.out_dir / "ckpt");
    write_text(opts.out_dir / "config.txt", to_config_text(cfg));
    write_text(log_path, opts.resume.empty() ? log_header()
                                             : truncated_log(log_path, trainer.epochs_done()));
  }
  while (trainer.epochs_done() < cfg.epochs) {
    const EpochLog entry = trainer.run_epoch(corpus.train, corpus.dev);
    if (write) {
      std::ofstream(log_path, std::ios::binary | std::ios::app) << log_rows(entry);
      const NamedMatrices ckpt = trainer.checkpoint();
      write_checkpoint(epoch_checkpoint(opts.out_dir, entry.epoch), ckpt);
      write_checkpoint(opts.out_dir / "model.bin", ckpt);
    }
    if (opts.on_epoch) opts.on_epoch(entry);
  }
  return trainer;
}

}  // namespace dca::train
