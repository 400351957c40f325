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

#pragma once

#include <ostream>
#include <span>
#include <vector>

#include "json.hpp"

#include "affectdialog/beam.hpp"
#include "affectdialog/classifier.hpp"
#include "affectdialog/model.hpp"

namespace affectdialog {

struct RerankWeights {
  double alpha = 50.0;
  double beta = 0.001;
  double gamma = 4.2;

  void validate() const;
};

/// Number of response tokens |R_C| (a trailing EOS is not counted).
std::size_t response_length(const Candidate& c);

/// Fills rev_logprob = log p(prompt | response) under `reverse_model` and
/// emotion = classifier(response words). Candidate ids are in `vocab`;
/// `prompt` is in `reverse_vocab`, which may differ. Candidates are
/// processed on up to `threads` worker threads (0 = hardware concurrency).
/// An empty response is fed to the reverse encoder as a lone EOS.
void annotate_candidates(std::vector<Candidate>& cands, std::span<const TokenId> prompt,
                         const Seq2SeqModel& reverse_model, const Vocabulary& vocab,
                         const Vocabulary& reverse_vocab, const EmotionClassifier& classifier,
                         const EmotionDistribution& e0, unsigned threads = 0);

/// final_score = fwd + alpha * rev + beta * |R_C| - gamma * ||E_RC - e0||_2.
/// rev_logprob is required unless alpha is 0, emotion unless gamma is 0.
double rerank_score(const Candidate& c, const EmotionDistribution& e0, const RerankWeights& w);

/// Sets final_score on every candidate.
void score_candidates(std::vector<Candidate>& cands, const EmotionDistribution& e0,
                      const RerankWeights& w);

/// Highest final_score; ties go to the shorter id sequence, then the
/// lexicographically smaller one. Throws std::invalid_argument when empty or
/// when a candidate is unscored.
const Candidate& select_final(std::span<const Candidate> cands);

/// One record with the four score terms and the final score.
nlohmann::json candidate_report(const Candidate& c, const Vocabulary& vocab,
                                const EmotionDistribution& e0);

/// Line-delimited candidate_report records.
void write_rerank_report(std::ostream& out, std::span<const Candidate> cands,
                         const Vocabulary& vocab, const EmotionDistribution& e0);

}  // namespace affectdialog
