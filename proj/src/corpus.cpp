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

#include "dca/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dca/error.hpp"
#include "dca/rng.hpp"

namespace dca::corpus {

using nlohmann::json;

Vocabulary::Vocabulary() {
  for (const char* t : {"<pad>", "<bos>", "<eos>", "<unk>"}) add(t);
}

Vocabulary::Vocabulary(const std::vector<std::string>& tokens) : Vocabulary() {
  for (const auto& t : tokens) {
    if (contains(t)) throw CorpusError("vocabulary: duplicate token '" + t + "'");
    add(t);
  }
}

TokenId Vocabulary::add(std::string_view token) {
  if (auto it = index_.find(std::string(token)); it != index_.end()) return it->second;
  const TokenId id = tokens_.size();
  tokens_.emplace_back(token);
  index_.emplace(tokens_.back(), id);
  return id;
}

bool Vocabulary::contains(std::string_view token) const {
  return index_.contains(std::string(token));
}

TokenId Vocabulary::id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnk : it->second;
}

std::vector<TokenId> Vocabulary::encode(std::string_view text) const {
  std::vector<TokenId> ids;
  for (const auto& tok : split_tokens(text)) ids.push_back(id(tok));
  return ids;
}

std::string Vocabulary::decode(const std::vector<TokenId>& ids) const {
  std::string out;
  for (TokenId id : ids) {
    if (!out.empty()) out += ' ';
    out += id < tokens_.size() ? tokens_[id] : "<unk>";
  }
  return out;
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CorpusError("cannot open vocabulary " + path.string());
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    tokens.push_back(line);
  }
  return Vocabulary(tokens);
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CorpusError("cannot write vocabulary " + path.string());
  for (std::size_t i = kNumReserved; i < tokens_.size(); ++i) out << tokens_[i] << '\n';
}

std::vector<std::string> split_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string normalize(std::string_view text) {
  std::string out;
  for (const auto& t : split_tokens(text)) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

void validate(const Instance& inst, std::size_t vocab_size) {
  auto fail = [&](const std::string& what) {
    throw CorpusError("instance '" + inst.id + "': " + what);
  };
  if (inst.frames.rows() == 0 || inst.frames.cols() == 0) fail("no frames");
  if (inst.context.empty()) fail("empty context");
  if (inst.target.empty()) fail("empty target");
  for (const auto* seq : {&inst.context, &inst.title, &inst.target}) {
    for (TokenId t : *seq) {
      if (t >= vocab_size) fail("token id " + std::to_string(t) + " outside vocabulary");
    }
  }
  if (!inst.frames.all_finite()) fail("non-finite frame value");
}

namespace {

std::string context_text(const std::vector<std::string>& comments) {
  std::string out;
  for (const auto& c : comments) {
    if (!out.empty()) {
      out += ' ';
      out += kSepToken;
      out += ' ';
    }
    out += normalize(c);
  }
  return out;
}

}  // namespace

Instance parse_instance(std::string_view json_line, const Vocabulary& vocab, std::size_t line_no) {
  const std::string where = "line " + std::to_string(line_no) + ": ";
  json j;
  try {
    j = json::parse(json_line);
  } catch (const json::exception& e) {
    throw CorpusError(where + "malformed JSON (" + e.what() + ")");
  }
  if (!j.is_object()) throw CorpusError(where + "expected a JSON object");
  Instance inst;
  try {
    inst.id = j.at("id").get<std::string>();
    inst.video_id = j.at("video_id").get<std::string>();
    const auto& frames = j.at("frames");
    if (!frames.is_array() || frames.empty()) throw CorpusError(where + "frames must be a non-empty array");
    const std::size_t df = frames.front().size();
    inst.frames = Matrix(frames.size(), df);
    for (std::size_t r = 0; r < frames.size(); ++r) {
      if (!frames[r].is_array() || frames[r].size() != df) {
        throw DimensionError(where + "frame " + std::to_string(r) + " has dimension " +
                             std::to_string(frames[r].size()) + ", expected " + std::to_string(df));
      }
      for (std::size_t c = 0; c < df; ++c) inst.frames(r, c) = frames[r][c].get<double>();
    }
    const auto& ctx = j.at("context");
    if (ctx.is_array()) {
      for (const auto& c : ctx) inst.comments.push_back(normalize(c.get<std::string>()));
    } else {
      inst.comments.push_back(normalize(ctx.get<std::string>()));
    }
    inst.title_text = normalize(j.at("title").get<std::string>());
    inst.target_text = normalize(j.at("target").get<std::string>());
  } catch (const json::exception& e) {
    throw CorpusError(where + "bad field (" + e.what() + ")");
  }
  inst.context = vocab.encode(context_text(inst.comments));
  inst.title = vocab.encode(inst.title_text);
  inst.target = vocab.encode(inst.target_text);
  try {
    validate(inst, vocab.size());
  } catch (const CorpusError& e) {
    throw CorpusError(where + e.what());
  }
  return inst;
}

std::string serialize_instance(const Instance& inst) {
  json frames = json::array();
  for (std::size_t r = 0; r < inst.frames.rows(); ++r) {
    auto row = inst.frames.row(r);
    frames.push_back(std::vector<double>(row.begin(), row.end()));
  }
  // Field order is fixed so output is byte-stable.
  std::ostringstream out;
  out << "{\"id\":" << json(inst.id).dump() << ",\"video_id\":" << json(inst.video_id).dump()
      << ",\"frames\":" << frames.dump() << ",\"context\":" << json(inst.comments).dump()
      << ",\"title\":" << json(inst.title_text).dump()
      << ",\"target\":" << json(inst.target_text).dump() << "}";
  return out.str();
}

std::vector<Instance> load_jsonl(const std::filesystem::path& path, const Vocabulary& vocab) {
  std::ifstream in(path);
  if (!in) throw CorpusError("cannot open " + path.string());
  std::vector<Instance> out;
  std::string line;
  std::size_t line_no = 0;
  std::size_t frame_dim = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (normalize(line).empty()) continue;
    Instance inst = parse_instance(line, vocab, line_no);
    if (frame_dim == 0) frame_dim = inst.frame_dim();
    if (inst.frame_dim() != frame_dim) {
      throw DimensionError(path.string() + " line " + std::to_string(line_no) +
                           ": frame dimension " + std::to_string(inst.frame_dim()) +
                           " differs from " + std::to_string(frame_dim));
    }
    out.push_back(std::move(inst));
  }
  return out;
}

void save_jsonl(const std::filesystem::path& path, const std::vector<Instance>& instances) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CorpusError("cannot write " + path.string());
  for (const auto& inst : instances) out << serialize_instance(inst) << '\n';
}

const std::vector<Instance>& Corpus::split(std::string_view name) const {
  if (name == "train") return train;
  if (name == "dev") return dev;
  if (name == "test") return test;
  throw UsageError("unknown split '" + std::string(name) + "'");
}

const Instance* Corpus::find(std::string_view id) const {
  for (const auto* s : {&test, &dev, &train}) {
    for (const auto& inst : *s) {
      if (inst.id == id) return &inst;
    }
  }
  return nullptr;
}

Corpus load_corpus(const std::filesystem::path& dir) {
  Corpus c;
  c.vocab = Vocabulary::load(dir / "vocab.txt");
  c.train = load_jsonl(dir / "train.jsonl", c.vocab);
  c.dev = load_jsonl(dir / "dev.jsonl", c.vocab);
  c.test = load_jsonl(dir / "test.jsonl", c.vocab);
  return c;
}

void save_corpus(const std::filesystem::path& dir, const Corpus& corpus) {
  std::filesystem::create_directories(dir);
  corpus.vocab.save(dir / "vocab.txt");
  save_jsonl(dir / "train.jsonl", corpus.train);
  save_jsonl(dir / "dev.jsonl", corpus.dev);
  save_jsonl(dir / "test.jsonl", corpus.test);
}

namespace {

struct SynthLexicon {
  std::vector<std::string> topics, actions, keywords, titles, fillers;
};

SynthLexicon make_lexicon(const SynthConfig& cfg) {
  if (cfg.vocab_size <= 20) {
    throw UsageError("vocab_size must exceed 20, got " + std::to_string(cfg.vocab_size));
  }
  const std::size_t c = cfg.comments_per_instance;
  const std::size_t rest = cfg.vocab_size - kNumReserved - 1;  // minus <sep>
  const std::size_t topics = std::clamp<std::size_t>(rest / 8, 2, 12);
  const std::size_t actions = std::clamp<std::size_t>(rest / 6, c, 10);
  const std::size_t keywords = std::clamp<std::size_t>(rest / 6, c, 12);
  const std::size_t used = 2 * topics + actions + keywords;
  if (used + 2 > rest) {
    throw UsageError("vocab_size " + std::to_string(cfg.vocab_size) +
                     " too small for the synthetic lexicon");
  }
  SynthLexicon lex;
  for (std::size_t i = 0; i < topics; ++i) lex.topics.push_back("topic" + std::to_string(i));
  for (std::size_t i = 0; i < actions; ++i) lex.actions.push_back("act" + std::to_string(i));
  for (std::size_t i = 0; i < keywords; ++i) lex.keywords.push_back("kw" + std::to_string(i));
  for (std::size_t i = 0; i < topics; ++i) lex.titles.push_back("title" + std::to_string(i));
  for (std::size_t i = 0; i < rest - used; ++i) lex.fillers.push_back("w" + std::to_string(i));
  return lex;
}

/// k distinct values from [0, n).
std::vector<std::size_t> distinct(Rng& rng, std::size_t n, std::size_t k) {
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  rng.shuffle(all);
  all.resize(k);
  return all;
}

std::string padded_index(std::size_t v) {
  std::string s = std::to_string(v);
  return s.size() < 3 ? std::string(3 - s.size(), '0') + s : s;
}

}  // namespace

Corpus generate_synthetic(const SynthConfig& cfg) {
  const SynthLexicon lex = make_lexicon(cfg);
  const std::size_t c = cfg.comments_per_instance;
  if (cfg.frames_per_instance == 0 || c == 0 || cfg.frame_dim == 0) {
    throw UsageError("synthetic corpus needs frames, comments and a frame dimension");
  }

  Corpus corpus;
  corpus.vocab.add(kSepToken);
  for (const auto* group : {&lex.topics, &lex.actions, &lex.keywords, &lex.titles, &lex.fillers}) {
    for (const auto& t : *group) corpus.vocab.add(t);
  }

  Rng rng(cfg.seed);
  const std::size_t df = cfg.frame_dim;
  std::vector<Matrix> topic_templates, action_signatures;
  for (std::size_t t = 0; t < lex.topics.size(); ++t) {
    Matrix m(1, df);
    for (double& v : m.data()) v = rng.normal();
    topic_templates.push_back(std::move(m));
  }
  for (std::size_t a = 0; a < lex.actions.size(); ++a) {
    Matrix m(1, df);
    for (double& v : m.data()) v = 1.5 * rng.normal();
    action_signatures.push_back(std::move(m));
  }
  auto filler = [&]() -> const std::string& { return lex.fillers[rng.below(lex.fillers.size())]; };

  std::vector<std::vector<Instance>> per_video(cfg.videos);
  for (std::size_t v = 0; v < cfg.videos; ++v) {
    const std::string video_id = "v" + padded_index(v);
    const std::size_t topic = rng.below(lex.topics.size());
    const std::string title =
        lex.titles[topic] + " " + lex.topics[topic] + " " + filler() + " " + filler();
    for (std::size_t i = 0; i < cfg.per_video; ++i) {
      Instance inst;
      inst.id = video_id + "_i" + padded_index(i);
      inst.video_id = video_id;
      inst.title_text = title;

      const auto acts = distinct(rng, lex.actions.size(), c);
      const auto kws = distinct(rng, lex.keywords.size(), c);
      const std::size_t chosen = rng.below(c);
      const std::size_t action = acts[chosen];
      const std::size_t event = rng.below(cfg.frames_per_instance);

      inst.frames = Matrix(cfg.frames_per_instance, df);
      for (std::size_t r = 0; r < cfg.frames_per_instance; ++r) {
        for (std::size_t k = 0; k < df; ++k) {
          double x = topic_templates[topic][k] + cfg.frame_noise * rng.normal();
          if (r == event) x += action_signatures[action][k];
          inst.frames(r, k) = x;
        }
      }
      for (std::size_t j = 0; j < c; ++j) {
        inst.comments.push_back(lex.actions[acts[j]] + " " + lex.keywords[kws[j]] + " " + filler());
      }
      inst.target_text = lex.topics[topic] + " " + lex.actions[action] + " " + lex.keywords[kws[chosen]];

      inst.context = corpus.vocab.encode(context_text(inst.comments));
      inst.title = corpus.vocab.encode(inst.title_text);
      inst.target = corpus.vocab.encode(inst.target_text);
      per_video[v].push_back(std::move(inst));
    }
  }

  std::vector<std::size_t> order(cfg.videos);
  for (std::size_t v = 0; v < cfg.videos; ++v) order[v] = v;
  rng.shuffle(order);
  const std::size_t n_eval = cfg.videos >= 3 ? std::max<std::size_t>(1, cfg.videos / 10) : 0;
  const std::size_t n_train = cfg.videos - 2 * n_eval;
  for (std::size_t k = 0; k < order.size(); ++k) {
    auto& dst = k < n_train ? corpus.train : (k < n_train + n_eval ? corpus.dev : corpus.test);
    for (auto& inst : per_video[order[k]]) dst.push_back(std::move(inst));
  }
  // Keep each split in video order.
  for (auto* s : {&corpus.train, &corpus.dev, &corpus.test}) {
    std::stable_sort(s->begin(), s->end(),
                     [](const Instance& a, const Instance& b) { return a.id < b.id; });
  }
  return corpus;
}

std::map<std::string, std::size_t> popularity_table(const std::vector<Instance>& train) {
  std::map<std::string, std::size_t> counts;
  for (const auto& inst : train) ++counts[inst.target_text];
  return counts;
}

std::vector<std::string> most_popular(const std::map<std::string, std::size_t>& table,
                                      std::size_t k) {
  std::vector<std::pair<std::string, std::size_t>> items(table.begin(), table.end());
  std::stable_sort(items.begin(), items.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < items.size() && i < k; ++i) out.push_back(items[i].first);
  return out;
}

}  // namespace dca::corpus
