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

#include "affectdialog/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace affectdialog {

namespace {

constexpr std::size_t kMaxOrder = 4;

std::map<Sentence, std::size_t> ngram_counts(const Sentence& s, std::size_t n) {
  std::map<Sentence, std::size_t> counts;
  for (std::size_t i = 0; i + n <= s.size(); ++i) {
    ++counts[Sentence(s.begin() + static_cast<std::ptrdiff_t>(i),
                      s.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return counts;
}

}  // namespace

double bleu(std::span<const Sentence> candidates, std::span<const Sentence> references) {
  if (candidates.empty()) throw std::invalid_argument("BLEU of an empty corpus");
  if (candidates.size() != references.size()) {
    throw std::invalid_argument("BLEU needs one reference per candidate");
  }
  std::size_t matches[kMaxOrder] = {}, totals[kMaxOrder] = {};
  std::size_t cand_len = 0, ref_len = 0;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    cand_len += candidates[k].size();
    ref_len += references[k].size();
    for (std::size_t n = 1; n <= kMaxOrder; ++n) {
      const auto ref = ngram_counts(references[k], n);
      for (const auto& [gram, count] : ngram_counts(candidates[k], n)) {
        totals[n - 1] += count;
        auto it = ref.find(gram);
        if (it != ref.end()) matches[n - 1] += std::min(count, it->second);
      }
    }
  }
  if (matches[0] == 0) return 0.0;
  double log_sum = std::log(static_cast<double>(matches[0]) / static_cast<double>(totals[0]));
  for (std::size_t n = 1; n < kMaxOrder; ++n) {
    log_sum += std::log((static_cast<double>(matches[n]) + 1.0) /
                        (static_cast<double>(totals[n]) + 1.0));
  }
  const double bp = cand_len > ref_len
                        ? 1.0
                        : std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(cand_len));
  return bp * std::exp(log_sum / static_cast<double>(kMaxOrder));
}

double sentence_bleu(const Sentence& candidate, const Sentence& reference) {
  return bleu(std::span(&candidate, 1), std::span(&reference, 1));
}

CandidateBleu candidate_list_bleu(std::span<const std::vector<Sentence>> candidate_lists,
                                  std::span<const Sentence> references) {
  if (candidate_lists.empty()) throw std::invalid_argument("BLEU of an empty corpus");
  if (candidate_lists.size() != references.size()) {
    throw std::invalid_argument("BLEU needs one reference per candidate list");
  }
  CandidateBleu out;
  for (std::size_t k = 0; k < candidate_lists.size(); ++k) {
    const auto& list = candidate_lists[k];
    if (list.empty()) continue;  // counts as 0
    double best = 0.0, sum = 0.0;
    for (const auto& c : list) {
      const double b = sentence_bleu(c, references[k]);
      best = std::max(best, b);
      sum += b;
    }
    out.max += best;
    out.mean += sum / static_cast<double>(list.size());
  }
  out.max /= static_cast<double>(candidate_lists.size());
  out.mean /= static_cast<double>(candidate_lists.size());
  return out;
}

double distinct_n(std::span<const Sentence> responses, std::size_t n) {
  if (n == 0) throw std::invalid_argument("distinct-n needs n >= 1");
  std::set<Sentence> seen;
  std::size_t tokens = 0;
  for (const auto& r : responses) {
    tokens += r.size();
    for (auto& [gram, count] : ngram_counts(r, n)) seen.insert(gram);
  }
  if (tokens == 0) throw std::invalid_argument("distinct-n of responses with no tokens");
  return static_cast<double>(seen.size()) / static_cast<double>(tokens);
}

nlohmann::json EvalReport::to_json() const {
  nlohmann::json j{{"bleu", bleu},
                   {"distinct1", distinct1},
                   {"distinct2", distinct2},
                   {"token_count", token_count}};
  if (candidates) {
    j["bleu_candidates_max"] = candidates->max;
    j["bleu_candidates_mean"] = candidates->mean;
  }
  return j;
}

EvalReport evaluate_responses(std::span<const Sentence> responses,
                              std::span<const Sentence> references) {
  EvalReport r;
  r.bleu = affectdialog::bleu(responses, references);
  r.distinct1 = distinct_n(responses, 1);
  r.distinct2 = distinct_n(responses, 2);
  for (const auto& s : responses) r.token_count += s.size();
  return r;
}

}  // namespace affectdialog
