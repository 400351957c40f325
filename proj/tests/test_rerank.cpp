// Copyright (c) 2026 The affectdialog Authors
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
#include "doctest.h"

#include <random>
#include <sstream>

#include "affectdialog/rerank.hpp"
#include "test_util.hpp"

using namespace affectdialog;

namespace {

Candidate make(std::vector<TokenId> ids, double fwd, double rev, const EmotionDistribution& e) {
  Candidate c;
  c.ids = std::move(ids);
  c.fwd_logprob = fwd;
  c.rev_logprob = rev;
  c.emotion = e;
  return c;
}

std::vector<Candidate> random_candidates(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> lp(-30.0, -0.1);
  std::uniform_int_distribution<std::size_t> len(1, 12);
  std::vector<Candidate> out;
  for (std::size_t i = 0; i < n; ++i) {
    auto ids = testutil::random_ids(rng, 50, len(rng));
    ids.push_back(Vocabulary::kEos);
    out.push_back(make(ids, lp(rng), lp(rng), testutil::random_distribution(rng)));
  }
  return out;
}

std::size_t selected_index(std::vector<Candidate> cands, const EmotionDistribution& e0,
                           const RerankWeights& w) {
  score_candidates(cands, e0, w);
  return static_cast<std::size_t>(&select_final(cands) - cands.data());
}

}  // namespace

TEST_CASE("default weights") {
  const RerankWeights w;
  CHECK(w.alpha == 50.0);
  CHECK(w.beta == 0.001);
  CHECK(w.gamma == 4.2);
}

TEST_CASE("score formula") {
  const auto e0 = emotion_from_name("joy");
  const auto e = emotion_from_name("sadness");
  const Candidate c = make({5, 6, 7, Vocabulary::kEos}, -3.0, -4.0, e);
  CHECK(response_length(c) == 3);
  const RerankWeights w{2.0, 0.5, 1.5};
  CHECK(rerank_score(c, e0, w) == doctest::Approx(-3.0 + 2.0 * -4.0 + 0.5 * 3 - 1.5 * std::sqrt(2.0)));
  Candidate bare;
  bare.ids = {5};
  bare.fwd_logprob = -1.0;
  CHECK(rerank_score(bare, e0, {0.0, 0.0, 0.0}) == -1.0);
  CHECK_THROWS_AS(rerank_score(bare, e0, {1.0, 0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(rerank_score(bare, e0, {0.0, 0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("single active terms") {
  const auto e0 = emotion_from_name("anger");
  std::vector<Candidate> c{make({4, 2}, -2.0, -1.0, e0), make({5, 6, 7, 2}, -1.0, -9.0, e0),
                           make({5, 2}, -5.0, -5.0, emotion_from_name("joy"))};
  CHECK(selected_index(c, e0, {0, 0, 0}) == 1);    // forward log prob alone
  CHECK(selected_index(c, e0, {0, 1e6, 0}) == 1);  // longest wins
  CHECK(selected_index(c, e0, {1, 0, 0}) == 0);

  std::vector<Candidate> twins{make({4, 2}, -2.0, -2.0, emotion_from_name("joy")),
                               make({5, 2}, -2.0, -2.0, emotion_from_name("anger"))};
  CHECK(selected_index(twins, e0, {1.0, 0.1, 0.5}) == 1);
}

TEST_CASE("select_final") {
  std::vector<Candidate> one{make({4}, -1, -1, {})};
  one[0].final_score = -1.0;
  CHECK(&select_final(one) == &one[0]);

  std::vector<Candidate> two{make({4}, -1, -1, {}), make({5}, -1, -1, {})};
  two[0].final_score = -1.0;
  two[1].final_score = -0.5;
  CHECK(&select_final(two) == &two[1]);

  std::vector<Candidate> tie{make({4, 5, 2}, -1, -1, {}), make({9, 2}, -1, -1, {}), make({8, 2}, -1, -1, {})};
  for (auto& c : tie) c.final_score = -2.0;
  CHECK(&select_final(tie) == &tie[2]);  // shorter, then smaller ids

  CHECK_THROWS_AS(select_final(std::vector<Candidate>{}), std::invalid_argument);
  CHECK_THROWS_AS(select_final(std::vector<Candidate>{make({4}, -1, -1, {})}), std::invalid_argument);
}

TEST_CASE("a constant shift of the forward scores keeps the selection") {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 50; ++trial) {
    auto cands = random_candidates(rng, 20);
    const auto e0 = testutil::random_distribution(rng);
    const RerankWeights w{1.0, 0.2, 3.0};
    const std::size_t before = selected_index(cands, e0, w);
    for (auto& c : cands) c.fwd_logprob -= 7.25;
    CHECK(selected_index(cands, e0, w) == before);
  }
}

TEST_CASE("raising gamma never moves the selection away from e0") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const auto cands = random_candidates(rng, 40);
    const auto e0 = EmotionDistribution::one_hot(static_cast<Emotion>(trial % 6));
    double prev = std::numeric_limits<double>::infinity();
    for (int g = 0; g < 40; ++g) {
      const std::size_t k = selected_index(cands, e0, {0.5, 0.01, 0.5 * g});
      const double d = emotion_distance(*cands[k].emotion, e0);
      CHECK(d <= prev);
      prev = d;
    }
  }
}

TEST_CASE("rerank report lines") {
  const Vocabulary vocab(std::vector<std::string>{"hello", "there"});
  std::vector<Candidate> cands{make({4, 5, Vocabulary::kEos}, -1.5, -2.5, emotion_from_name("joy"))};
  score_candidates(cands, emotion_from_name("joy"), {});
  std::ostringstream out;
  write_rerank_report(out, cands, vocab, emotion_from_name("joy"));
  const auto j = nlohmann::json::parse(out.str());
  CHECK(j["text"] == "hello there");
  CHECK(j["length"] == 2);
  CHECK(j["fwd_logprob"] == -1.5);
  CHECK(j["rev_logprob"] == -2.5);
  CHECK(j["emotion_distance"] == 0.0);
  CHECK(j["final_score"].get<double>() == doctest::Approx(-1.5 + 50 * -2.5 + 0.002));
}
