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

#include "affectdialog/rerank.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

namespace affectdialog {

void RerankWeights::validate() const {
  if (!std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(gamma)) {
    throw std::invalid_argument("rerank weights must be finite");
  }
}

std::size_t response_length(const Candidate& c) {
  return c.ids.size() - (c.ends_with(Vocabulary::kEos) ? 1 : 0);
}

void annotate_candidates(std::vector<Candidate>& cands, std::span<const TokenId> prompt,
                         const Seq2SeqModel& reverse_model, const Vocabulary& vocab,
                         const Vocabulary& reverse_vocab, const EmotionClassifier& classifier,
                         const EmotionDistribution& e0, unsigned threads) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(cands.size(), 1)));

  const auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < cands.size(); i += stride) {
      Candidate& c = cands[i];
      std::vector<TokenId> src = c.response();
      const std::vector<std::string> words = vocab.decode(src);
      c.emotion = classifier.classify(words);
      if (&vocab != &reverse_vocab) src = reverse_vocab.encode(words);
      if (src.empty()) src.push_back(Vocabulary::kEos);
      c.rev_logprob = reverse_model.sequence_log_prob(src, prompt, e0);
    }
  };
  if (threads == 1) {
    work(0, 1);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          work(t, threads);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

double rerank_score(const Candidate& c, const EmotionDistribution& e0, const RerankWeights& w) {
  double score = c.fwd_logprob + w.beta * static_cast<double>(response_length(c));
  if (w.alpha != 0.0) {
    if (!c.rev_logprob) throw std::invalid_argument("candidate lacks a reverse log-probability");
    score += w.alpha * *c.rev_logprob;
  }
  if (w.gamma != 0.0) {
    if (!c.emotion) throw std::invalid_argument("candidate lacks an emotion distribution");
    score -= w.gamma * emotion_distance(*c.emotion, e0);
  }
  return score;
}

void score_candidates(std::vector<Candidate>& cands, const EmotionDistribution& e0,
                      const RerankWeights& w) {
  w.validate();
  for (auto& c : cands) c.final_score = rerank_score(c, e0, w);
}

const Candidate& select_final(std::span<const Candidate> cands) {
  if (cands.empty()) throw std::invalid_argument("no candidates to select from");
  const Candidate* best = nullptr;
  for (const auto& c : cands) {
    if (!c.final_score) throw std::invalid_argument("candidate has no final score");
    if (!best) {
      best = &c;
      continue;
    }
    const double s = *c.final_score, b = *best->final_score;
    if (s > b || (s == b && (c.ids.size() < best->ids.size() ||
                             (c.ids.size() == best->ids.size() && c.ids < best->ids)))) {
      best = &c;
    }
  }
  return *best;
}

nlohmann::json candidate_report(const Candidate& c, const Vocabulary& vocab,
                                const EmotionDistribution& e0) {
  nlohmann::json j;
  j["ids"] = c.ids;
  j["text"] = join_tokens(vocab.decode(c.response()));
  j["fwd_logprob"] = c.fwd_logprob;
  j["rev_logprob"] = c.rev_logprob ? nlohmann::json(*c.rev_logprob) : nlohmann::json(nullptr);
  j["length"] = response_length(c);
  if (c.emotion) {
    j["emotion"] = c.emotion->probs();
    j["emotion_distance"] = emotion_distance(*c.emotion, e0);
  } else {
    j["emotion"] = nullptr;
    j["emotion_distance"] = nullptr;
  }
  j["final_score"] = c.final_score ? nlohmann::json(*c.final_score) : nlohmann::json(nullptr);
  return j;
}

void write_rerank_report(std::ostream& out, std::span<const Candidate> cands,
                         const Vocabulary& vocab, const EmotionDistribution& e0) {
  for (const auto& c : cands) out << candidate_report(c, vocab, e0).dump() << '\n';
}

}  // namespace affectdialog
