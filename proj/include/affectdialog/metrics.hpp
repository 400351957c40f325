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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace affectdialog {

using Sentence = std::vector<std::string>;

/// Corpus BLEU with one reference per candidate: geometric mean of clipped
/// 1..4-gram precisions, add-one smoothed for n >= 2, times the brevity
/// penalty. A zero unigram precision gives 0. Throws std::invalid_argument
/// on an empty corpus or mismatched sizes.
double bleu(std::span<const Sentence> candidates, std::span<const Sentence> references);

double sentence_bleu(const Sentence& candidate, const Sentence& reference);

/// Per prompt, the best (or mean) sentence BLEU over that prompt's candidate
/// list, averaged over prompts.
struct CandidateBleu {
  double max = 0.0;
  double mean = 0.0;
};
CandidateBleu candidate_list_bleu(std::span<const std::vector<Sentence>> candidate_lists,
                                  std::span<const Sentence> references);

/// Distinct n-grams across all responses divided by the total number of
/// tokens. Throws std::invalid_argument when n is 0 or there are no tokens.
double distinct_n(std::span<const Sentence> responses, std::size_t n);

struct EvalReport {
  double bleu = 0.0;
  double distinct1 = 0.0;
  double distinct2 = 0.0;
  std::size_t token_count = 0;
  std::optional<CandidateBleu> candidates;

  nlohmann::json to_json() const;
};

EvalReport evaluate_responses(std::span<const Sentence> responses,
                              std::span<const Sentence> references);

}  // namespace affectdialog
