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

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "affectdialog/affective.hpp"
#include "affectdialog/corpus.hpp"
#include "affectdialog/gru.hpp"
#include "affectdialog/params.hpp"

namespace affectdialog {

struct ModelConfig {
  std::size_t vocab_size = 0;
  Eigen::Index embed_dim = 300;
  Eigen::Index hidden_dim = 256;  // per encoder direction; the decoder uses 2x
  std::size_t encoder_layers = 2;
  double dropout = 0.2;
  std::size_t max_length = 20;
  ModelVariant variant;
  std::uint64_t seed = 0;

  Eigen::Index decoder_hidden() const { return 2 * hidden_dim; }
  Eigen::Index decoder_input_dim() const { return embed_dim + (variant.sed ? 3 : 0); }
  void validate() const;
};

/// Per-pair loss terms.
struct PairLoss {
  double total = 0.0;
  double nll = 0.0;
  double reg = 0.0;
};

/// GRU encoder-decoder with the optional affect mechanisms.
///
/// Encoder: stacked bidirectional GRUs over the prompt embeddings (plus the
/// SEE prefix at position 0). The top layer's final forward and backward
/// states are concatenated into the decoder's initial state.
/// Decoder: one GRU over [previous word embedding; e_SED], followed by an
/// affine projection to vocabulary logits.
class Seq2SeqModel {
 public:
  /// Initializes every weight uniformly in +-1/sqrt(hidden) from cfg.seed.
  /// `vocab_vad` is the 3 x |V| VAD matrix used by WI and WE.
  Seq2SeqModel(ModelConfig cfg, Mat vocab_vad);

  /// Wraps existing tensors (checkpoint load). Missing or misshapen
  /// parameters throw std::invalid_argument.
  Seq2SeqModel(ModelConfig cfg, Mat vocab_vad, ParameterStore params);

  Seq2SeqModel(const Seq2SeqModel& other);
  Seq2SeqModel& operator=(const Seq2SeqModel& other);
  Seq2SeqModel(Seq2SeqModel&&) = delete;
  Seq2SeqModel& operator=(Seq2SeqModel&&) = delete;

  const ModelConfig& config() const { return cfg_; }
  const Mat& vocab_vad() const { return vocab_vad_; }
  ParameterStore& params() { return params_; }
  const ParameterStore& params() const { return params_; }

  double lambda_param() const;

  /// Teacher-forced loss. With `dropout_rng` set, dropout is active. When
  /// `grad_scale` is non-zero, grad_scale * dLoss/dtheta is added to the
  /// parameter gradients. `mu` weights the regularizer (used only with WI).
  PairLoss forward_backward(const DialogPair& pair, double mu, double grad_scale,
                            std::mt19937_64* dropout_rng = nullptr);

  /// Loss without gradients, dropout off.
  PairLoss loss(const DialogPair& pair, double mu) const;

  /// Final encoder summary (2 * hidden). Throws on empty input.
  Vec encode(std::span<const TokenId> ids, const std::optional<Vec>& see = std::nullopt) const;

  /// Encoder summary including the SEE prefix when that flag is set.
  Vec encode_prompt(std::span<const TokenId> ids, const EmotionDistribution& e0) const;

  /// One decoder GRU step followed by the output projection.
  std::pair<Vec, Vec> decode_step(const Vec& input, const Vec& h_prev) const;

  /// Decoder input for `prev` (embedding, plus e_SED when enabled).
  Vec decoder_input(TokenId prev, const EmotionDistribution& e0) const;

  /// Next-token distribution from logits; applies the WE mixture when set.
  Vec next_token_probs(const Vec& logits, const AffectiveState& affect) const;

  /// Sum over steps of log p(target_t) (targets followed by EOS), dropout off.
  double sequence_log_prob(std::span<const TokenId> src, std::span<const TokenId> tgt,
                           const EmotionDistribution& e0) const;

 private:
  struct Handles {
    Parameter* embedding = nullptr;  // E x V, column per token
    std::vector<std::pair<GruParams, GruParams>> encoder;  // (forward, backward) per layer
    GruParams decoder;
    Parameter* out_w = nullptr;  // V x D
    Parameter* out_b = nullptr;  // V x 1
    Parameter* see_a = nullptr;     // 3 x 6
    Parameter* see_proj = nullptr;  // E x 3
    Parameter* sed_a = nullptr;     // 3 x 6
    Parameter* we_lambda = nullptr;  // 1 x 1
  };

  void create_parameters();
  void bind();
  PairLoss run(const DialogPair& pair, double mu, double grad_scale, std::mt19937_64* rng);

  ModelConfig cfg_;
  Mat vocab_vad_;
  ParameterStore params_;
  Handles h_;
};

/// Decoding cursor over a frozen model for one prompt and target emotion.
/// Satisfies the step-model interface used by beam search.
class DecodeSession {
 public:
  struct State {
    Vec h;
    Vec probs;
    Vec log_probs;
    AffectiveState affect;
  };

  DecodeSession(const Seq2SeqModel& model, std::span<const TokenId> prompt,
                const EmotionDistribution& e0);

  State start() const;
  State advance(const State& s, TokenId token) const;
  const Vec& log_probs(const State& s) const { return s.log_probs; }
  TokenId eos() const { return Vocabulary::kEos; }
  std::size_t vocab_size() const { return model_.config().vocab_size; }

 private:
  State step(Vec h_prev, TokenId input, AffectiveState affect) const;

  const Seq2SeqModel& model_;
  EmotionDistribution e0_;
  Vec summary_;
};

}  // namespace affectdialog
