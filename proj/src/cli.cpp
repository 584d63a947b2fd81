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

#include "dca/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "dca/coattention.hpp"
#include "dca/corpus.hpp"
#include "dca/decoder.hpp"
#include "dca/error.hpp"
#include "dca/evalrank.hpp"
#include "dca/ortho.hpp"
#include "dca/train.hpp"

namespace dca::cli {

namespace fs = std::filesystem;

void write_csv(const fs::path& path, const Matrix& m) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  char buf[40];
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", m(r, c));
      out << (c ? "," : "") << buf;
    }
    out << "\n";
  }
}

Matrix read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw DimensionError("ragged CSV " + path.string());
    }
    rows.push_back(std::move(row));
  }
  Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
  }
  return m;
}

void write_pgm(const fs::path& path, const Matrix& m, std::size_t cell) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  const auto [lo, hi] = std::minmax_element(m.data().begin(), m.data().end());
  const double span = m.data().empty() ? 0.0 : *hi - *lo;
  out << "P5\n" << m.cols() * cell << " " << m.rows() * cell << "\n255\n";
  for (std::size_t r = 0; r < m.rows() * cell; ++r) {
    for (std::size_t c = 0; c < m.cols() * cell; ++c) {
      const double v = m(r / cell, c / cell);
      const double t = span > 0.0 ? (v - *lo) / span : 0.5;
      out.put(static_cast<char>(static_cast<unsigned char>(t * 255.0 + 0.5)));
    }
  }
}

namespace {

/// Config keys exposed as flags with the same name.
constexpr const char* kConfigKeys[] = {
    "d",     "d_f",  "K",           "beta",          "lr",           "epochs",
    "dropout", "batch", "seed",      "gam.enabled",   "ortho.enabled", "ortho.beta",
    "ortho.mode", "dca.traditional", "scoring"};

struct RunFlags {
  std::string config_file;
  std::map<std::string, std::string> values;
  bool no_ortho = false;
  bool no_gam = false;
  bool no_dca = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_file, "flat key=value config file (flags override)");
    for (const char* key : kConfigKeys) {
      cmd->add_option(std::string("--") + key, values[key], std::string("config key ") + key);
    }
    cmd->add_flag("--no-ortho", no_ortho, "shortcut for --ortho.enabled false");
    cmd->add_flag("--no-gam", no_gam, "shortcut for --gam.enabled false");
    cmd->add_flag("--no-dca", no_dca, "shortcut for --dca.traditional true");
  }

  train::RunConfig resolve(CLI::App* cmd) const {
    train::RunConfig cfg;
    if (!config_file.empty()) cfg = train::load_config(config_file);
    for (const char* key : kConfigKeys) {
      if (cmd->count(std::string("--") + key) > 0) train::set_option(cfg, key, values.at(key));
    }
    if (no_ortho) cfg.ortho.enabled = false;
    if (no_gam) cfg.gam = false;
    if (no_dca) cfg.traditional = true;
    train::validate(cfg);
    return cfg;
  }
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

struct LoadedModel {
  ParamStore params;
  ModelConfig cfg;
};

LoadedModel load_model(const fs::path& path) {
  LoadedModel m{import_store(read_checkpoint(path)), {}};
  m.cfg = infer_model_config(m.params);
  return m;
}

/// The run config echoed next to evaluation outputs: architecture from the
/// checkpoint, everything else from the flags.
train::RunConfig with_architecture(train::RunConfig cfg, const ModelConfig& model) {
  cfg.d = model.hidden;
  cfg.d_f = model.frame_dim;
  cfg.K = model.perspectives;
  cfg.gam = model.gam;
  cfg.traditional = model.traditional;
  return cfg;
}

const std::vector<corpus::Instance>& split_of(const corpus::Corpus& c, const std::string& name) {
  try {
    return c.split(name);
  } catch (const Error&) {
    throw UsageError("unknown split '" + name + "' (expected train|dev|test)");
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Diversified co-attention live comment model"};
  app.require_subcommand(1);

  corpus::SynthConfig synth;
  fs::path out_dir, data_dir, model_path, resume_path;
  std::string split = "test", instance_id, name = "model";
  std::size_t max_len = 20;
  std::optional<std::uint64_t> sample_seed;
  RunFlags flags;

  auto* gen = app.add_subcommand("gen-data", "write a synthetic corpus");
  gen->add_option("--out", out_dir, "output directory")->required();
  gen->add_option("--seed", synth.seed);
  gen->add_option("--videos", synth.videos);
  gen->add_option("--per-video", synth.per_video);
  gen->add_option("--d_f,--frame-dim", synth.frame_dim);
  gen->add_option("--vocab-size", synth.vocab_size);
  gen->add_option("--frames", synth.frames_per_instance);
  gen->add_option("--comments", synth.comments_per_instance);
  gen->add_option("--noise", synth.frame_noise);

  auto* trn = app.add_subcommand("train", "train a model");
  trn->add_option("--data", data_dir, "corpus directory")->required();
  trn->add_option("--out", out_dir, "run directory")->required();
  trn->add_option("--resume", resume_path, "checkpoint to continue from");
  flags.attach(trn);

  auto* evl = app.add_subcommand("eval", "rank the 100 candidates of every instance");
  auto* gnr = app.add_subcommand("generate", "greedy (or sampled) comment generation");
  auto* dmp = app.add_subcommand("dump-attn", "write per-perspective similarity matrices");
  for (auto* cmd : {evl, gnr, dmp}) {
    cmd->add_option("--data", data_dir, "corpus directory")->required();
    cmd->add_option("--model", model_path, "checkpoint")->required();
  }
  evl->add_option("--out", out_dir, "report directory")->required();
  evl->add_option("--split", split);
  evl->add_option("--name", name, "row label of the text table");
  evl->add_option("--seed", synth.seed, "candidate sampling seed");
  evl->add_option("--scoring", flags.values["scoring"], "mean|sum");
  gnr->add_option("--split", split);
  gnr->add_option("--id", instance_id, "single instance (default: whole split)");
  gnr->add_option("--max-len", max_len);
  gnr->add_option("--sample-seed", sample_seed, "sample from the softmax instead of argmax");
  dmp->add_option("--id", instance_id)->required();
  dmp->add_option("--out", out_dir)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) {
      const corpus::Corpus c = corpus::generate_synthetic(synth);
      corpus::save_corpus(out_dir, c);
      out << "wrote " << c.train.size() << "/" << c.dev.size() << "/" << c.test.size()
          << " train/dev/test instances, vocabulary " << c.vocab.size() << ", to "
          << out_dir.string() << "\n";
    } else if (trn->parsed()) {
      const train::RunConfig cfg = flags.resolve(trn);
      const corpus::Corpus c = corpus::load_corpus(data_dir);
      train::TrainOptions opts;
      opts.out_dir = out_dir;
      opts.resume = resume_path;
      opts.on_epoch = [&out](const train::EpochLog& e) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "epoch %3zu  train %.4f  dev %.4f  r_beta %.3e\n",
                      e.epoch, e.train_nll, e.dev_nll, e.r_beta);
        out << buf << std::flush;
      };
      train::run(cfg, c, opts);
    } else if (evl->parsed()) {
      train::RunConfig cfg;
      if (!flags.values["scoring"].empty()) train::set_option(cfg, "scoring", flags.values["scoring"]);
      cfg.seed = synth.seed;
      const corpus::Corpus c = corpus::load_corpus(data_dir);
      const LoadedModel m = load_model(model_path);
      const evalrank::CandidatePool pool(c.train, c.vocab);
      const evalrank::RankReport report = evalrank::evaluate(
          m.params, m.cfg, split_of(c, split), pool, {cfg.seed, cfg.scoring});
      fs::create_directories(out_dir);
      write_text(out_dir / "report.json", evalrank::to_json(report));
      write_text(out_dir / "report.txt", evalrank::to_table(report, name));
      write_text(out_dir / "config.txt", train::to_config_text(with_architecture(cfg, m.cfg)));
      out << evalrank::to_table(report, name);
    } else if (gnr->parsed()) {
      const corpus::Corpus c = corpus::load_corpus(data_dir);
      const LoadedModel m = load_model(model_path);
      std::vector<const corpus::Instance*> todo;
      if (!instance_id.empty()) {
        const corpus::Instance* inst = c.find(instance_id);
        if (inst == nullptr) throw UsageError("unknown instance id '" + instance_id + "'");
        todo.push_back(inst);
      } else {
        for (const auto& inst : split_of(c, split)) todo.push_back(&inst);
      }
      std::optional<Rng> sampler;
      if (sample_seed) sampler.emplace(*sample_seed);
      for (const auto* inst : todo) {
        const auto ids =
            decoder::generate(m.params, *inst, m.cfg, max_len, sampler ? &*sampler : nullptr);
        out << inst->id << "\t" << c.vocab.decode(ids) << "\t" << inst->target_text << "\n";
      }
    } else if (dmp->parsed()) {
      const corpus::Corpus c = corpus::load_corpus(data_dir);
      const LoadedModel m = load_model(model_path);
      const corpus::Instance* inst = c.find(instance_id);
      if (inst == nullptr) throw UsageError("unknown instance id '" + instance_id + "'");
      if (!m.cfg.gam) throw UsageError("model was trained without the gated attention module; "
                                       "it has no co-attention to dump");
      ad::Tape tape(m.params);
      const decoder::Conditioning cond(tape, *inst, m.cfg, {});
      fs::create_directories(out_dir);
      std::vector<Matrix> S;
      for (std::size_t k = 0; k < cond.codependent()->S.size(); ++k) {
        S.push_back(cond.codependent()->S[k].value());
        const std::string stem = "S_" + std::to_string(k);
        write_csv(out_dir / (stem + ".csv"), S.back());
        write_pgm(out_dir / (stem + ".pgm"), S.back());
      }
      std::vector<Matrix> Ls = ortho::metrics_of(m.params);
      if (Ls.empty()) Ls.push_back(Matrix::identity(m.cfg.hidden));
      const Matrix G = ortho::gram(Ls);
      write_csv(out_dir / "gram.csv", G);
      out << "wrote " << S.size() << " similarity matrices (" << inst->num_frames() << "x"
          << inst->context.size() << ") and gram.csv to " << out_dir.string() << "\n";
      out << "off-diagonal gram mass " << ortho::off_diagonal_mass(G);
      if (S.size() >= 2) {
        out << ", mean pairwise correlation " << coattention::mean_pairwise_correlation(S);
      }
      out << "\n";
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace dca::cli
