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

#include <span>
#include <string>
#include <vector>

#include "affectdialog/affect.hpp"
#include "affectdialog/lexicon.hpp"
#include "affectdialog/ops.hpp"
#include "affectdialog/text.hpp"

namespace affectdialog {

/// Which affect mechanisms a model uses. All false is a plain seq2seq.
struct ModelVariant {
  bool see = false;  // emotion embedding prepended to the encoder input
  bool sed = false;  // emotion embedding appended to every decoder input
  bool wi = false;   // affective regularizer in the loss
  bool we = false;   // adaptive affective sampling

  /// Accepts "baseline" or '+'-joined flags, e.g. "wi+we".
  static ModelVariant parse(const std::string& text);
  std::string to_string() const;
  bool is_baseline() const { return !see && !sed && !wi && !we; }
  friend bool operator==(const ModelVariant&, const ModelVariant&) = default;
};

/// The 3 x |V| matrix of per-word VAD columns. Special tokens are neutral.
Mat vocabulary_vad_matrix(const Vocabulary& vocab, const VadLexicon& lexicon);

inline VadVector vad_column(const Mat& vad, TokenId id) {
  return {vad(0, id), vad(1, id), vad(2, id)};
}

Vec emotion_vector(const EmotionDistribution& e);

/// see_proj * (A_SEE * e0): the extra encoder input placed before the prompt.
Vec see_prefix(const Mat& a_see, const Mat& see_proj, const EmotionDistribution& e0);

/// [prev_embedding; A_SED * e0].
Vec sed_decoder_input(const Mat& a_sed, const Vec& prev_embedding, const EmotionDistribution& e0);

/// || mean_t(VAD * s_t) - mean_t(vad(target_t)) ||_2.
/// When `grad_dists` is given it receives dReg/ds_t for every step (zero at
/// the non-differentiable point where the norm vanishes).
double affective_regularizer(std::span<const Vec> step_distributions,
                             std::span<const TokenId> target_ids, const Mat& vocab_vad,
                             std::vector<Vec>* grad_dists = nullptr);

inline double total_loss(double nll, double reg, double mu) { return nll + mu * reg; }

/// Component i is -|| e_t - vad(w_i) ||_2.
Vec v_scores(const VadVector& e_t, const Mat& vocab_vad);

/// lambda * softmax(lm_logits) + (1 - lambda) * softmax(v_scores(e_t)).
Vec we_mixture(const Vec& lm_logits, const VadVector& e_t, const Mat& vocab_vad, double lambda);

/// The learned mixture weight, logistic(lambda_param), forced to exactly 1
/// once floor(max_length / 2) words have been emitted.
double effective_lambda(double lambda_param, std::size_t emitted, std::size_t max_length);

enum class GoalOrigin { kTraining, kInference };

struct AffectiveGoal {
  VadVector e0_vad;
  GoalOrigin origin = GoalOrigin::kTraining;
};

/// Sum of the target words' VAD vectors.
AffectiveGoal init_affective_goal(std::span<const TokenId> target_ids, const Mat& vocab_vad);
/// M_VAD * e0 * max_length.
AffectiveGoal init_affective_goal(const EmotionDistribution& e0, std::size_t max_length);

/// Remaining emotional content while decoding.
struct AffectiveState {
  VadVector e_t;
  std::size_t step = 0;
  double lambda_param = 0.0;

  static AffectiveState start(const AffectiveGoal& goal, double lambda_param) {
    return {goal.e0_vad, 0, lambda_param};
  }
  double lambda(std::size_t max_length) const {
    return effective_lambda(lambda_param, step, max_length);
  }
};

/// e_t -= vad(emitted); step += 1.
AffectiveState update_affective_state(const AffectiveState& s, TokenId emitted,
                                      const Mat& vocab_vad);

}  // namespace affectdialog
