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

#include <algorithm>
#include <cmath>
#include <concepts>
#include <optional>
#include <stdexcept>
#include <vector>

#include "affectdialog/affect.hpp"
#include "affectdialog/ops.hpp"
#include "affectdialog/text.hpp"

namespace affectdialog {

struct BeamConfig {
  std::size_t beam_size = 1;
  std::size_t max_length = 20;
  bool length_norm = true;

  void validate() const {
    if (beam_size < 1) throw std::invalid_argument("beam_size must be >= 1");
    if (max_length < 1) throw std::invalid_argument("max_length must be >= 1");
  }
};

struct Candidate {
  std::vector<TokenId> ids;  // ends with EOS unless cut off at max_length
  double fwd_logprob = 0.0;
  double beam_score = 0.0;  // fwd_logprob, divided by ids.size() under length_norm
  std::optional<double> rev_logprob;
  std::optional<EmotionDistribution> emotion;
  std::optional<double> final_score;

  bool ends_with(TokenId eos) const { return !ids.empty() && ids.back() == eos; }
  /// Response tokens, excluding a trailing EOS.
  std::vector<TokenId> response(TokenId eos = Vocabulary::kEos) const {
    return {ids.begin(), ids.end() - (ends_with(eos) ? 1 : 0)};
  }
};

/// A frozen next-token model: a start state, a transition on an emitted
/// token and a log-distribution per state. Entries of -inf are never
/// expanded.
template <class M>
concept StepModel = requires(const M& m, const typename M::State& s, TokenId t) {
  { m.start() } -> std::convertible_to<typename M::State>;
  { m.advance(s, t) } -> std::convertible_to<typename M::State>;
  { m.log_probs(s) } -> std::convertible_to<const Vec&>;
  { m.eos() } -> std::convertible_to<TokenId>;
};

namespace detail {

inline Candidate make_candidate(std::vector<TokenId> ids, double logp, bool length_norm) {
  Candidate c;
  c.fwd_logprob = logp;
  c.beam_score = length_norm ? logp / static_cast<double>(ids.size()) : logp;
  c.ids = std::move(ids);
  return c;
}

}  // namespace detail

/// Ranking order for beam output: higher beam_score first, then smaller
/// token ids lexicographically.
inline bool beam_before(const Candidate& a, const Candidate& b) {
  if (a.beam_score != b.beam_score) return a.beam_score > b.beam_score;
  return a.ids < b.ids;
}

/// Standard beam search. Each step expands every live hypothesis by every
/// token and keeps the best `beam_size` expansions; those ending in EOS or
/// reaching max_length are finished. Returns at most `beam_size` finished
/// hypotheses sorted by beam_before.
template <StepModel M>
std::vector<Candidate> beam_search(const M& model, const BeamConfig& cfg) {
  cfg.validate();
  struct Hyp {
    typename M::State state;
    std::vector<TokenId> ids;
    double logp;
  };
  struct Expansion {
    double logp;
    std::size_t parent;
    TokenId token;
  };
  // Live hypotheses share a length, so (parent rank, token) is the
  // lexicographic order of the extended sequences.
  const auto before = [](const Expansion& a, const Expansion& b) {
    if (a.logp != b.logp) return a.logp > b.logp;
    if (a.parent != b.parent) return a.parent < b.parent;
    return a.token < b.token;
  };

  const TokenId eos = model.eos();
  std::vector<Hyp> alive;
  alive.push_back({model.start(), {}, 0.0});
  std::vector<Candidate> finished;

  for (std::size_t len = 1; len <= cfg.max_length && !alive.empty(); ++len) {
    std::sort(alive.begin(), alive.end(), [](const Hyp& a, const Hyp& b) { return a.ids < b.ids; });
    std::vector<Expansion> heap;  // worst kept expansion on top
    heap.reserve(cfg.beam_size + 1);
    for (std::size_t p = 0; p < alive.size(); ++p) {
      const Vec& lp = model.log_probs(alive[p].state);
      for (Eigen::Index t = 0; t < lp.size(); ++t) {
        if (!std::isfinite(lp(t))) continue;
        const Expansion e{alive[p].logp + lp(t), p, static_cast<TokenId>(t)};
        if (heap.size() < cfg.beam_size) {
          heap.push_back(e);
          std::push_heap(heap.begin(), heap.end(), before);
        } else if (before(e, heap.front())) {
          std::pop_heap(heap.begin(), heap.end(), before);
          heap.back() = e;
          std::push_heap(heap.begin(), heap.end(), before);
        }
      }
    }
    std::sort_heap(heap.begin(), heap.end(), before);

    std::vector<Hyp> next;
    for (const Expansion& e : heap) {
      const Hyp& parent = alive[e.parent];
      std::vector<TokenId> ids = parent.ids;
      ids.push_back(e.token);
      if (e.token == eos || len == cfg.max_length) {
        finished.push_back(detail::make_candidate(std::move(ids), e.logp, cfg.length_norm));
      } else {
        next.push_back({model.advance(parent.state, e.token), std::move(ids), e.logp});
      }
    }
    alive = std::move(next);
  }

  std::sort(finished.begin(), finished.end(), beam_before);
  if (finished.size() > cfg.beam_size) finished.resize(cfg.beam_size);
  return finished;
}

/// Repeated argmax (smallest id on ties) until EOS or max_length.
template <StepModel M>
Candidate greedy_decode(const M& model, std::size_t max_length, bool length_norm = true) {
  if (max_length < 1) throw std::invalid_argument("max_length must be >= 1");
  const TokenId eos = model.eos();
  auto state = model.start();
  std::vector<TokenId> ids;
  double logp = 0.0;
  while (ids.size() < max_length) {
    const Vec& lp = model.log_probs(state);
    Eigen::Index best = -1;
    for (Eigen::Index t = 0; t < lp.size(); ++t) {
      if (std::isfinite(lp(t)) && (best < 0 || lp(t) > lp(best))) best = t;
    }
    if (best < 0) break;
    const auto token = static_cast<TokenId>(best);
    ids.push_back(token);
    logp += lp(best);
    if (token == eos) break;
    if (ids.size() < max_length) state = model.advance(state, token);
  }
  if (ids.empty()) throw std::runtime_error("greedy decoding found no finite continuation");
  return detail::make_candidate(std::move(ids), logp, length_norm);
}

}  // namespace affectdialog
