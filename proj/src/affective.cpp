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

#include "affectdialog/affective.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace affectdialog {

ModelVariant ModelVariant::parse(const std::string& text) {
  ModelVariant v;
  if (text == "baseline") return v;
  std::stringstream ss(text);
  std::string flag;
  bool any = false;
  while (std::getline(ss, flag, '+')) {
    any = true;
    if (flag == "see") v.see = true;
    else if (flag == "sed") v.sed = true;
    else if (flag == "wi") v.wi = true;
    else if (flag == "we") v.we = true;
    else throw std::invalid_argument("unknown model variant flag '" + flag + "'");
  }
  if (!any) throw std::invalid_argument("empty model variant");
  return v;
}

std::string ModelVariant::to_string() const {
  if (is_baseline()) return "baseline";
  std::string out;
  auto add = [&](bool on, const char* name) {
    if (!on) return;
    if (!out.empty()) out += '+';
    out += name;
  };
  add(see, "see");
  add(sed, "sed");
  add(wi, "wi");
  add(we, "we");
  return out;
}

Mat vocabulary_vad_matrix(const Vocabulary& vocab, const VadLexicon& lexicon) {
  Mat vad(3, static_cast<Eigen::Index>(vocab.size()));
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    const auto id = static_cast<TokenId>(i);
    const VadVector x = Vocabulary::is_special(id) ? kNeutralVad : lexicon.lookup(vocab.word(id));
    vad.col(id) << x.v, x.a, x.d;
  }
  return vad;
}

Vec emotion_vector(const EmotionDistribution& e) {
  Vec out(kNumEmotions);
  for (std::size_t i = 0; i < kNumEmotions; ++i) out(static_cast<Eigen::Index>(i)) = e[i];
  return out;
}

Vec see_prefix(const Mat& a_see, const Mat& see_proj, const EmotionDistribution& e0) {
  return see_proj * (a_see * emotion_vector(e0));
}

Vec sed_decoder_input(const Mat& a_sed, const Vec& prev_embedding,
                      const EmotionDistribution& e0) {
  Vec out(prev_embedding.size() + a_sed.rows());
  out << prev_embedding, a_sed * emotion_vector(e0);
  return out;
}

double affective_regularizer(std::span<const Vec> step_distributions,
                             std::span<const TokenId> target_ids, const Mat& vocab_vad,
                             std::vector<Vec>* grad_dists) {
  if (step_distributions.empty() || target_ids.empty()) {
    throw std::invalid_argument("affective_regularizer needs at least one step and one target");
  }
  Eigen::Vector3d generated = Eigen::Vector3d::Zero();
  for (const Vec& s : step_distributions) generated += vocab_vad * s;
  generated /= static_cast<double>(step_distributions.size());

  Eigen::Vector3d target = Eigen::Vector3d::Zero();
  for (TokenId id : target_ids) target += vocab_vad.col(id);
  target /= static_cast<double>(target_ids.size());

  const Eigen::Vector3d diff = generated - target;
  const double reg = diff.norm();
  if (grad_dists) {
    grad_dists->assign(step_distributions.size(), Vec::Zero(vocab_vad.cols()));
    if (reg > 0.0) {
      const Vec g = vocab_vad.transpose() * (diff / (reg * static_cast<double>(step_distributions.size())));
      for (auto& gd : *grad_dists) gd = g;
    }
  }
  return reg;
}

Vec v_scores(const VadVector& e_t, const Mat& vocab_vad) {
  const Eigen::Vector3d e(e_t.v, e_t.a, e_t.d);
  return -(vocab_vad.colwise() - e).colwise().norm().transpose();
}

Vec we_mixture(const Vec& lm_logits, const VadVector& e_t, const Mat& vocab_vad, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda outside [0,1]");
  if (lambda == 1.0) return softmax(lm_logits);
  if (lambda == 0.0) return softmax(v_scores(e_t, vocab_vad));
  return lambda * softmax(lm_logits) + (1.0 - lambda) * softmax(v_scores(e_t, vocab_vad));
}

double effective_lambda(double lambda_param, std::size_t emitted, std::size_t max_length) {
  if (emitted >= max_length / 2) return 1.0;
  return sigmoid(lambda_param);
}

AffectiveGoal init_affective_goal(std::span<const TokenId> target_ids, const Mat& vocab_vad) {
  AffectiveGoal g{{0.0, 0.0, 0.0}, GoalOrigin::kTraining};
  for (TokenId id : target_ids) g.e0_vad += vad_column(vocab_vad, id);
  return g;
}

AffectiveGoal init_affective_goal(const EmotionDistribution& e0, std::size_t max_length) {
  return {emotion_to_vad(e0) * static_cast<double>(max_length), GoalOrigin::kInference};
}

AffectiveState update_affective_state(const AffectiveState& s, TokenId emitted,
                                      const Mat& vocab_vad) {
  AffectiveState out = s;
  out.e_t -= vad_column(vocab_vad, emitted);
  ++out.step;
  return out;
}

}  // namespace affectdialog
