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

#ifndef DCA_CORPUS_HPP_
#define DCA_CORPUS_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dca/matrix.hpp"

namespace dca::corpus {

using TokenId = std::size_t;

inline constexpr TokenId kPad = 0;
inline constexpr TokenId kBos = 1;
inline constexpr TokenId kEos = 2;
inline constexpr TokenId kUnk = 3;
inline constexpr std::size_t kNumReserved = 4;
/// Separator placed between concatenated surrounding comments.
inline constexpr std::string_view kSepToken = "<sep>";

/// Token <-> id bijection. Ids 0..3 are PAD, BOS, EOS, UNK; file tokens start at 4.
class Vocabulary {
 public:
  Vocabulary();
  /// `tokens` are the non-reserved entries in id order.
  explicit Vocabulary(const std::vector<std::string>& tokens);

  std::size_t size() const { return tokens_.size(); }
  /// Adds a token if absent; returns its id.
  TokenId add(std::string_view token);
  bool contains(std::string_view token) const;
  TokenId id(std::string_view token) const;  // UNK when absent
  const std::string& token(TokenId id) const { return tokens_.at(id); }

  /// Whitespace tokenization, OOV -> UNK.
  std::vector<TokenId> encode(std::string_view text) const;
  std::string decode(const std::vector<TokenId>& ids) const;

  /// One token per line; line k (1-based) is id k - 1 + 4.
  static Vocabulary load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
};

/// Splits on ASCII whitespace.
std::vector<std::string> split_tokens(std::string_view text);
/// Tokens joined by single spaces; the canonical surface form of a comment.
std::string normalize(std::string_view text);

struct Instance {
  std::string id;
  std::string video_id;
  Matrix frames;                     // n x d_f
  std::vector<std::string> comments; // surrounding comments, surface form
  std::string title_text;
  std::string target_text;
  std::vector<TokenId> context;      // comments joined by <sep>
  std::vector<TokenId> title;
  std::vector<TokenId> target;

  std::size_t num_frames() const { return frames.rows(); }
  std::size_t frame_dim() const { return frames.cols(); }

  friend bool operator==(const Instance&, const Instance&) = default;
};

/// Throws CorpusError if an Instance invariant is broken.
void validate(const Instance& inst, std::size_t vocab_size);

/// Parses one JSON object. `line_no` is used in error messages.
Instance parse_instance(std::string_view json_line, const Vocabulary& vocab, std::size_t line_no);
std::string serialize_instance(const Instance& inst);

/// One object per line with fields id, video_id, frames, context, title,
/// target. `context` may be a string or an array of comment strings (joined
/// with <sep>). Blank lines are skipped.
std::vector<Instance> load_jsonl(const std::filesystem::path& path, const Vocabulary& vocab);
void save_jsonl(const std::filesystem::path& path, const std::vector<Instance>& instances);

struct Corpus {
  Vocabulary vocab;
  std::vector<Instance> train;
  std::vector<Instance> dev;
  std::vector<Instance> test;

  const std::vector<Instance>& split(std::string_view name) const;
  /// Searches test, dev, then train.
  const Instance* find(std::string_view id) const;
};

/// Reads vocab.txt and train/dev/test.jsonl from `dir`.
Corpus load_corpus(const std::filesystem::path& dir);
void save_corpus(const std::filesystem::path& dir, const Corpus& corpus);

struct SynthConfig {
  std::uint64_t seed = 7;
  std::size_t videos = 50;
  std::size_t per_video = 20;
  std::size_t frame_dim = 16;
  std::size_t vocab_size = 64;
  std::size_t frames_per_instance = 5;
  std::size_t comments_per_instance = 3;
  double frame_noise = 0.3;
};

/// Synthetic ALVC-shaped corpus. Every video draws a topic whose template
/// vector is the base of all its frames. Each instance marks one frame as the
/// event frame and adds an action signature to it. The surrounding comments
/// each name a distinct action and a distinct keyword; the target is
/// "topic<t> act<a> kw<k>" where t is the topic, a is the event frame's
/// action, and k is the keyword of the comment that names a. Neither modality
/// alone determines the target.
///
/// Splits are 80/10/10 by video.
Corpus generate_synthetic(const SynthConfig& cfg);

/// Exact surface-string counts of training targets.
std::map<std::string, std::size_t> popularity_table(const std::vector<Instance>& train);

/// The `k` most frequent comments, ties broken lexicographically.
std::vector<std::string> most_popular(const std::map<std::string, std::size_t>& table,
                                      std::size_t k);

}  // namespace dca::corpus

#endif  // DCA_CORPUS_HPP_
