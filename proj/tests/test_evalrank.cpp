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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dca/error.hpp"
#include "dca/evalrank.hpp"
#include "dca/rng.hpp"

using dca::Rng;
namespace er = dca::evalrank;
namespace corpus = dca::corpus;

namespace {

const corpus::Corpus& shared_corpus() {
  static const corpus::Corpus c = [] {
    corpus::SynthConfig cfg;
    cfg.videos = 30;
    cfg.per_video = 20;
    return corpus::generate_synthetic(cfg);
  }();
  return c;
}

}  // namespace

TEST_CASE("tfidf: identical texts score 1, disjoint texts score 0") {
  const er::TfIdf t({"a b", "a c", "b b d"});
  CHECK(t.similarity("a b", "a b") == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(t.similarity("a", "c d") == 0.0);
  CHECK(t.similarity("zzz", "a b") == 0.0);
  CHECK(t.idf("zzz") == 0.0);
}

TEST_CASE("tfidf: three-document hand computation") {
  const er::TfIdf t({"a b", "a c", "b b d"});
  const double l15 = std::log(1.5), l3 = std::log(3.0);
  CHECK(t.num_documents() == 3);
  CHECK(t.idf("a") == doctest::Approx(l15).epsilon(1e-15));
  CHECK(t.idf("d") == doctest::Approx(l3).epsilon(1e-15));
  const auto v = t.vector("b b d");
  CHECK(v.at("b") == doctest::Approx(2 * l15).epsilon(1e-15));
  const double expect = (2 * l15 * l15) / (std::sqrt(2.0) * l15 * std::sqrt(4 * l15 * l15 + l3 * l3));
  CHECK(t.similarity("a b", "b b d") == doctest::Approx(expect).epsilon(1e-13));
  CHECK(t.similarity("b b d", "a b") == t.similarity("a b", "b b d"));
}

TEST_CASE("candidate sets have the fixed composition and are seed-deterministic") {
  const auto& c = shared_corpus();
  const er::CandidatePool pool(c.train, c.vocab);
  REQUIRE(pool.comments().size() >= 100);
  for (std::size_t i = 0; i < 20; ++i) {
    const auto& inst = c.test[i];
    const auto set = er::build_candidates(inst, pool, 1000 + i);
    CHECK_NOTHROW(er::check_invariants(set));
    CHECK(set.entries[0].label == er::Label::kGroundTruth);
    CHECK(set.entries[0].text == inst.target_text);
    CHECK(set.count(er::Label::kPlausible) == 30);
    CHECK(set.count(er::Label::kPopular) == 20);
    CHECK(set.count(er::Label::kRandom) == 49);
    for (const auto& e : set.entries) CHECK(e.tokens == c.vocab.encode(e.text));

    const auto again = er::build_candidates(inst, pool, 1000 + i);
    std::vector<std::string> a, b;
    for (const auto& e : set.entries) a.push_back(e.text);
    for (const auto& e : again.entries) b.push_back(e.text);
    CHECK(a == b);
  }
}

TEST_CASE("plausible candidates are the top titles by similarity") {
  const auto& c = shared_corpus();
  const er::CandidatePool pool(c.train, c.vocab);
  const auto& inst = c.test[0];
  const auto set = er::build_candidates(inst, pool, 3);
  double min_plausible = 1e9;
  std::set<std::string> plausible;
  for (const auto& e : set.entries) {
    if (e.label != er::Label::kPlausible) continue;
    plausible.insert(e.text);
    min_plausible = std::min(min_plausible, pool.tfidf().similarity(e.text, inst.title_text));
  }
  for (const auto& text : pool.comments()) {
    if (plausible.contains(text) || text == inst.target_text) continue;
    CHECK(pool.tfidf().similarity(text, inst.title_text) <= min_plausible);
  }
}

TEST_CASE("a popular ground truth is not duplicated") {
  const auto& c = shared_corpus();
  const er::CandidatePool pool(c.train, c.vocab);
  corpus::Instance inst = c.test[0];
  inst.target_text = pool.by_popularity().front();
  inst.target = c.vocab.encode(inst.target_text);
  const auto set = er::build_candidates(inst, pool, 9);
  CHECK_NOTHROW(er::check_invariants(set));
  CHECK(set.count(er::Label::kGroundTruth) == 1);
}

TEST_CASE("fewer than 99 other comments raises CorpusTooSmallError") {
  corpus::SynthConfig cfg;
  cfg.videos = 3;
  cfg.per_video = 5;
  const auto c = corpus::generate_synthetic(cfg);
  const er::CandidatePool pool(c.train, c.vocab);
  CHECK_THROWS_AS(er::build_candidates(c.test.at(0), pool, 1), dca::CorpusTooSmallError);
}

TEST_CASE("different seeds change only the random fill") {
  const auto& c = shared_corpus();
  const er::CandidatePool pool(c.train, c.vocab);
  const auto a = er::build_candidates(c.test[1], pool, 1);
  const auto b = er::build_candidates(c.test[1], pool, 2);
  bool random_differs = false;
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    if (a.entries[i].label != er::Label::kRandom) {
      CHECK(a.entries[i].text == b.entries[i].text);
    } else {
      random_differs = random_differs || a.entries[i].text != b.entries[i].text;
    }
  }
  CHECK(random_differs);
}

TEST_CASE("rank_metrics: hand values") {
  const std::size_t ones[] = {1, 1, 1};
  const auto perfect = er::rank_metrics(ones);
  CHECK(perfect.recall_at.at(1) == 100.0);
  CHECK(perfect.mrr == 100.0);
  CHECK(perfect.mr == 1.0);

  const std::size_t mixed[] = {1, 2, 4};
  const auto r = er::rank_metrics(mixed);
  CHECK(r.recall_at.at(1) == doctest::Approx(100.0 / 3).epsilon(1e-12));
  CHECK(r.recall_at.at(5) == 100.0);
  CHECK(r.mr == doctest::Approx(7.0 / 3).epsilon(1e-12));
  CHECK(r.mrr == doctest::Approx(100.0 * 1.75 / 3).epsilon(1e-12));

  CHECK_THROWS_AS(er::rank_metrics({}), dca::Error);
  const std::size_t bad[] = {0};
  CHECK_THROWS_AS(er::rank_metrics(bad), dca::Error);
  const std::size_t high[] = {101};
  CHECK_THROWS_AS(er::rank_metrics(high), dca::Error);
}

TEST_CASE("rank_metrics agrees with a brute-force count") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    std::vector<std::size_t> ranks(1 + rng.below(40));
    for (auto& r : ranks) r = 1 + rng.below(100);
    const auto rep = er::rank_metrics(ranks);
    for (int k : {1, 5, 10}) {
      std::size_t hits = 0;
      for (auto r : ranks) hits += r <= static_cast<std::size_t>(k);
      CHECK(rep.recall_at.at(k) ==
            doctest::Approx(100.0 * hits / ranks.size()).epsilon(1e-12));
    }
    CHECK(rep.recall_at.at(1) <= rep.recall_at.at(5));
    CHECK(rep.recall_at.at(5) <= rep.recall_at.at(10));
    CHECK(rep.mrr >= 1.0);
    CHECK(rep.mrr <= 100.0);
    CHECK(rep.mr >= 1.0);
  }
}

TEST_CASE("rank_of: strict order and tie handling") {
  const double scores[] = {0.5, 0.9, 0.1, 0.5};
  CHECK(er::rank_of(scores, 1, 0) == 1);
  CHECK(er::rank_of(scores, 2, 0) == 4);
  std::set<std::size_t> seen;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto r = er::rank_of(scores, 0, s);
    CHECK((r == 2 || r == 3));
    CHECK(r + er::rank_of(scores, 3, s) == 5);
    seen.insert(r);
  }
  CHECK(seen.size() == 2);
  const std::vector<double> flat(100, -1.0);
  double sum = 0.0;
  for (std::uint64_t s = 0; s < 2000; ++s) sum += static_cast<double>(er::rank_of(flat, 0, s));
  CHECK(sum / 2000 == doctest::Approx(50.5).epsilon(0.05));
}

TEST_CASE("a random scorer lands near MR 50.5 and MRR 5.19") {
  Rng rng(42);
  std::vector<std::size_t> ranks;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    std::vector<double> scores(100);
    for (double& s : scores) s = rng.uniform();
    ranks.push_back(er::rank_of(scores, 0, i));
  }
  const auto rep = er::rank_metrics(ranks);
  double harmonic = 0.0;
  for (int k = 1; k <= 100; ++k) harmonic += 1.0 / k;
  CHECK(std::abs(rep.mr - 50.5) < 3.0);
  CHECK(std::abs(rep.mrr - harmonic) < 1.5);
  CHECK(std::abs(rep.recall_at.at(10) - 10.0) < 3.0);
}

TEST_CASE("json and table reports") {
  const std::size_t ranks[] = {1, 3};
  auto rep = er::rank_metrics(ranks);
  rep.ids = {"x", "y"};
  const auto j = nlohmann::json::parse(er::to_json(rep));
  CHECK(j.at("recall_at_1").get<double>() == 50.0);
  CHECK(j.at("mr").get<double>() == 2.0);
  CHECK(j.at("instances").get<int>() == 2);
  CHECK(j.at("ranks").at(1).at("id") == "y");
  CHECK(j.at("ranks").at(1).at("rank") == 3);
  const auto table = er::to_table(rep, "Full");
  CHECK(table.find("R@10") != std::string::npos);
  CHECK(table.find("Full") != std::string::npos);
  CHECK(table.find("66.67") != std::string::npos);
  CHECK(er::to_string(er::Label::kPopular) == "popular");
}
