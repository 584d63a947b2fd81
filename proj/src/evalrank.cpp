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

#include "dca/evalrank.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "dca/error.hpp"
#include "dca/rng.hpp"

namespace dca::evalrank {

TfIdf::TfIdf(const std::vector<std::string>& documents) : n_(documents.size()) {
  std::map<std::string, std::size_t, std::less<>> df;
  for (const auto& doc : documents) {
    const auto tokens = corpus::split_tokens(doc);
    for (const auto& tok : std::set<std::string>(tokens.begin(), tokens.end())) ++df[tok];
  }
  for (const auto& [tok, count] : df) {
    idf_[tok] = std::log(static_cast<double>(n_) / static_cast<double>(count));
  }
}

double TfIdf::idf(std::string_view token) const {
  const auto it = idf_.find(token);
  return it == idf_.end() ? 0.0 : it->second;
}

std::map<std::string, double> TfIdf::vector(std::string_view text) const {
  std::map<std::string, double> tf;
  for (const auto& tok : corpus::split_tokens(text)) tf[tok] += 1.0;
  for (auto& [tok, w] : tf) w *= idf(tok);
  return tf;
}

double TfIdf::similarity(std::string_view a, std::string_view b) const {
  const auto va = vector(a);
  const auto vb = vector(b);
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [tok, w] : va) {
    na += w * w;
    if (const auto it = vb.find(tok); it != vb.end()) dot += w * it->second;
  }
  for (const auto& [tok, w] : vb) nb += w * w;
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::string_view to_string(Label label) {
  switch (label) {
    case Label::kGroundTruth: return "ground-truth";
    case Label::kPlausible: return "plausible";
    case Label::kPopular: return "popular";
    case Label::kRandom: return "random";
  }
  return "?";
}

std::size_t CandidateSet::count(Label label) const {
  return static_cast<std::size_t>(std::count_if(
      entries.begin(), entries.end(), [label](const Candidate& c) { return c.label == label; }));
}

void check_invariants(const CandidateSet& set) {
  if (set.entries.size() != kNumCandidates) {
    throw Error("candidate set has " + std::to_string(set.entries.size()) + " entries");
  }
  const std::size_t counts[] = {set.count(Label::kGroundTruth), set.count(Label::kPlausible),
                                set.count(Label::kPopular), set.count(Label::kRandom)};
  if (counts[0] != 1 || counts[1] != kNumPlausible || counts[2] != kNumPopular ||
      counts[3] != kNumRandom) {
    throw Error("candidate set composition (" + std::to_string(counts[0]) + ", " +
                std::to_string(counts[1]) + ", " + std::to_string(counts[2]) + ", " +
                std::to_string(counts[3]) + ")");
  }
  std::unordered_set<std::string> seen;
  for (const auto& c : set.entries) {
    if (!seen.insert(c.text).second) throw Error("duplicate candidate '" + c.text + "'");
  }
}

CandidatePool::CandidatePool(const std::vector<corpus::Instance>& train,
                             const corpus::Vocabulary& vocab)
    : tfidf_([&] {
        std::vector<std::string> docs;
        docs.reserve(train.size());
        for (const auto& inst : train) docs.push_back(inst.target_text);
        return docs;
      }()),
      vocab_(&vocab) {
  const auto table = corpus::popularity_table(train);
  for (const auto& entry : table) comments_.push_back(entry.first);
  by_popularity_ = corpus::most_popular(table, table.size());
}

CandidateSet build_candidates(const corpus::Instance& inst, const CandidatePool& pool,
                              std::uint64_t seed) {
  const std::string& truth = inst.target_text;
  const auto& comments = pool.comments();
  const bool truth_in_pool = std::binary_search(comments.begin(), comments.end(), truth);
  const std::size_t available = comments.size() - (truth_in_pool ? 1 : 0);
  if (available + 1 < kNumCandidates) {
    throw CorpusTooSmallError("candidate pool has " + std::to_string(available) +
                              " distinct comments besides the ground truth; need " +
                              std::to_string(kNumCandidates - 1));
  }

  CandidateSet set;
  std::unordered_set<std::string> chosen{truth};
  auto take = [&](const std::string& text, Label label) {
    chosen.insert(text);
    set.entries.push_back({text, pool.vocab().encode(text), label});
  };
  set.entries.push_back({truth, inst.target, Label::kGroundTruth});

  std::vector<std::size_t> order(comments.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> sim(comments.size());
  for (std::size_t i = 0; i < comments.size(); ++i) {
    sim[i] = pool.tfidf().similarity(comments[i], inst.title_text);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return sim[a] > sim[b]; });
  auto fill = [&](const auto& ranked, std::size_t quota, Label label) {
    std::size_t taken = 0;
    for (std::size_t i = 0; i < ranked.size() && taken < quota; ++i) {
      const std::string& text = ranked[i];
      if (!chosen.contains(text)) {
        take(text, label);
        ++taken;
      }
    }
  };
  std::vector<std::string> by_similarity;
  by_similarity.reserve(order.size());
  for (std::size_t i : order) by_similarity.push_back(comments[i]);
  fill(by_similarity, kNumPlausible, Label::kPlausible);
  fill(pool.by_popularity(), kNumPopular, Label::kPopular);

  std::vector<std::string> rest;
  for (const auto& text : comments) {
    if (!chosen.contains(text)) rest.push_back(text);
  }
  Rng rng(seed);
  rng.shuffle(rest);
  for (std::size_t i = 0; i < kNumRandom; ++i) take(rest[i], Label::kRandom);
  return set;
}

RankReport rank_metrics(std::span<const std::size_t> ranks) {
  if (ranks.empty()) throw Error("rank_metrics: empty rank list");
  RankReport report;
  double sum = 0.0, recip = 0.0;
  std::size_t hits[3] = {0, 0, 0};
  constexpr int kCut[3] = {1, 5, 10};
  for (std::size_t r : ranks) {
    if (r < 1 || r > kNumCandidates) {
      throw Error("rank_metrics: rank " + std::to_string(r) + " outside [1, 100]");
    }
    sum += static_cast<double>(r);
    recip += 1.0 / static_cast<double>(r);
    for (int c = 0; c < 3; ++c) hits[c] += r <= static_cast<std::size_t>(kCut[c]) ? 1 : 0;
  }
  const double n = static_cast<double>(ranks.size());
  for (int c = 0; c < 3; ++c) report.recall_at[kCut[c]] = 100.0 * static_cast<double>(hits[c]) / n;
  report.mr = sum / n;
  report.mrr = 100.0 * recip / n;
  report.ranks.assign(ranks.begin(), ranks.end());
  return report;
}

std::size_t rank_of(std::span<const double> scores, std::size_t truth, std::uint64_t seed) {
  std::vector<std::size_t> position(scores.size());
  std::iota(position.begin(), position.end(), 0);
  Rng rng(seed);
  rng.shuffle(position);
  std::size_t rank = 1;
  for (std::size_t j = 0; j < scores.size(); ++j) {
    if (j == truth) continue;
    if (scores[j] > scores[truth] ||
        (scores[j] == scores[truth] && position[j] < position[truth])) {
      ++rank;
    }
  }
  return rank;
}

RankReport evaluate(const ParamStore& params, const ModelConfig& cfg,
                    const std::vector<corpus::Instance>& instances, const CandidatePool& pool,
                    const EvalOptions& opts) {
  std::vector<std::size_t> ranks;
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& inst = instances[i];
    const CandidateSet set = build_candidates(inst, pool, Rng::derive(opts.seed, i, 0).next());
    std::vector<std::vector<corpus::TokenId>> tokens;
    tokens.reserve(set.entries.size());
    for (const auto& c : set.entries) tokens.push_back(c.tokens);
    const auto scores = decoder::score_all(params, inst, cfg, tokens, opts.mode);
    ranks.push_back(rank_of(scores, 0, Rng::derive(opts.seed, i, 1).next()));
    ids.push_back(inst.id);
  }
  RankReport report = rank_metrics(ranks);
  report.ids = std::move(ids);
  return report;
}

std::string to_json(const RankReport& report) {
  nlohmann::ordered_json j;
  j["recall_at_1"] = report.recall_at.at(1);
  j["recall_at_5"] = report.recall_at.at(5);
  j["recall_at_10"] = report.recall_at.at(10);
  j["mrr"] = report.mrr;
  j["mr"] = report.mr;
  j["instances"] = report.ranks.size();
  auto& per = j["ranks"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < report.ranks.size(); ++i) {
    nlohmann::ordered_json row;
    if (i < report.ids.size()) row["id"] = report.ids[i];
    row["rank"] = report.ranks[i];
    per.push_back(std::move(row));
  }
  return j.dump(2) + "\n";
}

std::string to_table(const RankReport& report, std::string_view row_name) {
  char buf[256];
  std::string out;
  std::snprintf(buf, sizeof buf, "%-12s %8s %8s %8s %8s %8s\n", "Model", "R@1", "R@5", "R@10",
                "MRR", "MR");
  out += buf;
  std::snprintf(buf, sizeof buf, "%-12.*s %8.2f %8.2f %8.2f %8.2f %8.2f\n",
                static_cast<int>(row_name.size()), row_name.data(), report.recall_at.at(1),
                report.recall_at.at(5), report.recall_at.at(10), report.mrr, report.mr);
  out += buf;
  return out;
}

}  // namespace dca::evalrank
