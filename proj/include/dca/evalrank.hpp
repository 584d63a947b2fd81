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

#ifndef DCA_EVALRANK_HPP_
#define DCA_EVALRANK_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dca/corpus.hpp"
#include "dca/decoder.hpp"
#include "dca/model.hpp"
#include "dca/params.hpp"

namespace dca::evalrank {

inline constexpr std::size_t kNumCandidates = 100;
inline constexpr std::size_t kNumPlausible = 30;
inline constexpr std::size_t kNumPopular = 20;
inline constexpr std::size_t kNumRandom = kNumCandidates - 1 - kNumPlausible - kNumPopular;

/// TF-IDF weighting over a fixed document collection: tf is the raw count,
/// idf = ln(N / df). Tokens that occur in no document get weight zero.
class TfIdf {
 public:
  explicit TfIdf(const std::vector<std::string>& documents);

  std::size_t num_documents() const { return n_; }
  double idf(std::string_view token) const;
  std::map<std::string, double> vector(std::string_view text) const;
  /// Cosine of the two TF-IDF vectors; 0 when either is zero.
  double similarity(std::string_view a, std::string_view b) const;

 private:
  std::size_t n_ = 0;
  std::map<std::string, double, std::less<>> idf_;
};

enum class Label { kGroundTruth, kPlausible, kPopular, kRandom };

std::string_view to_string(Label label);

struct Candidate {
  std::string text;
  std::vector<corpus::TokenId> tokens;
  Label label;
};

struct CandidateSet {
  std::vector<Candidate> entries;

  std::size_t count(Label label) const;
};

/// Throws Error unless the set has 100 entries labeled (1, 30, 20, 49), no
/// repeated surface string, and the ground truth exactly once.
void check_invariants(const CandidateSet& set);

/// Everything candidate construction needs from the training split: the
/// distinct target comments, their frequencies, and the IDF table.
class CandidatePool {
 public:
  CandidatePool(const std::vector<corpus::Instance>& train, const corpus::Vocabulary& vocab);

  const std::vector<std::string>& comments() const { return comments_; }
  const std::vector<std::string>& by_popularity() const { return by_popularity_; }
  const TfIdf& tfidf() const { return tfidf_; }
  const corpus::Vocabulary& vocab() const { return *vocab_; }

 private:
  std::vector<std::string> comments_;       // distinct, sorted
  std::vector<std::string> by_popularity_;  // distinct, most frequent first
  TfIdf tfidf_;
  const corpus::Vocabulary* vocab_;
};

/// Ground truth, the 30 comments most similar to the title, the 20 most
/// frequent, and a seeded uniform fill to 100, all distinct. Similarity and
/// frequency ties go to the lexicographically smaller comment. Throws
/// CorpusTooSmallError when the pool cannot supply 100 distinct comments.
CandidateSet build_candidates(const corpus::Instance& inst, const CandidatePool& pool,
                              std::uint64_t seed);

struct RankReport {
  std::map<int, double> recall_at;  // k -> percentage, k in {1, 5, 10}
  double mr = 0.0;
  double mrr = 0.0;                 // percentage
  std::vector<std::size_t> ranks;
  std::vector<std::string> ids;     // instance ids aligned with ranks (may be empty)
};

/// Throws Error on an empty list or a rank outside [1, 100].
RankReport rank_metrics(std::span<const std::size_t> ranks);

/// 1-based rank of entry `truth` when sorting scores descending. Equal scores
/// are ordered by a seeded shuffle of the candidate positions.
std::size_t rank_of(std::span<const double> scores, std::size_t truth, std::uint64_t seed);

struct EvalOptions {
  std::uint64_t seed = 7;
  decoder::ScoreMode mode = decoder::ScoreMode::kMean;
};

/// Builds, scores and ranks the candidate set of every instance.
RankReport evaluate(const ParamStore& params, const ModelConfig& cfg,
                    const std::vector<corpus::Instance>& instances, const CandidatePool& pool,
                    const EvalOptions& opts);

std::string to_json(const RankReport& report);
/// Columns R@1, R@5, R@10, MRR, MR.
std::string to_table(const RankReport& report, std::string_view row_name = "model");

}  // namespace dca::evalrank

#endif  // DCA_EVALRANK_HPP_
