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

#include "affectdialog/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace affectdialog {

void ModelConfig::validate() const {
  if (vocab_size <= Vocabulary::kNumSpecials) {
    throw std::invalid_argument("vocab_size must exceed the number of special tokens");
  }
  if (embed_dim < 1 || hidden_dim < 1) throw std::invalid_argument("dimensions must be positive");
  if (encoder_layers < 1) throw std::invalid_argument("encoder needs at least one layer");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw std::invalid_argument("dropout must be in [0,1)");
  if (max_length < 2) throw std::invalid_argument("max_length must be >= 2");
}

namespace {

std::string layer_prefix(std::size_t layer, bool backward) {
  return "enc.l" + std::to_string(layer) + (backward ? ".bwd" : ".fwd");
}

// Inverted dropout mask: 0 with probability p, 1/(1-p) otherwise.
Vec dropout_mask(Eigen::Index n, double p, std::mt19937_64& rng) {
  Vec m(n);
  const double keep = 1.0 / (1.0 - p);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    m(i) = u < p ? 0.0 : keep;
  }
  return m;
}

}  // namespace

Seq2SeqModel::Seq2SeqModel(ModelConfig cfg, Mat vocab_vad)
    : cfg_(std::move(cfg)), vocab_vad_(std::move(vocab_vad)) {
  cfg_.validate();
  if (vocab_vad_.rows() != 3 || static_cast<std::size_t>(vocab_vad_.cols()) != cfg_.vocab_size) {
    throw std::invalid_argument("vocab VAD matrix must be 3 x vocab_size");
  }
  create_parameters();
  bind();

  // Core weights come from one stream and affect weights from another, so
  // the core initialization is the same for every variant.
  std::mt19937_64 core_rng(cfg_.seed);
  const double enc_scale = 1.0 / std::sqrt(static_cast<double>(cfg_.hidden_dim));
  const double dec_scale = 1.0 / std::sqrt(static_cast<double>(cfg_.decoder_hidden()));
  ParameterStore::init_uniform(*h_.embedding, enc_scale, core_rng);
  for (auto& [fwd, bwd] : h_.encoder) {
    for (GruParams* g : {&fwd, &bwd}) {
      ParameterStore::init_uniform(*g->w, enc_scale, core_rng);
      ParameterStore::init_uniform(*g->u, enc_scale, core_rng);
      ParameterStore::init_uniform(*g->b, enc_scale, core_rng);
    }
  }
  ParameterStore::init_uniform(*h_.decoder.w, dec_scale, core_rng);
  ParameterStore::init_uniform(*h_.decoder.u, dec_scale, core_rng);
  ParameterStore::init_uniform(*h_.decoder.b, dec_scale, core_rng);
  ParameterStore::init_uniform(*h_.out_w, dec_scale, core_rng);
  ParameterStore::init_uniform(*h_.out_b, dec_scale, core_rng);

  std::mt19937_64 affect_rng(cfg_.seed ^ 0x9e3779b97f4a7c15ULL);
  if (h_.see_a) {
    ParameterStore::init_uniform(*h_.see_a, enc_scale, affect_rng);
    ParameterStore::init_uniform(*h_.see_proj, enc_scale, affect_rng);
  }
  if (h_.sed_a) ParameterStore::init_uniform(*h_.sed_a, enc_scale, affect_rng);
  if (h_.we_lambda) h_.we_lambda->value.setZero();  // lambda = 0.5
}

Seq2SeqModel::Seq2SeqModel(ModelConfig cfg, Mat vocab_vad, ParameterStore params)
    : cfg_(std::move(cfg)), vocab_vad_(std::move(vocab_vad)) {
  cfg_.validate();
  if (vocab_vad_.rows() != 3 || static_cast<std::size_t>(vocab_vad_.cols()) != cfg_.vocab_size) {
    throw std::invalid_argument("vocab VAD matrix must be 3 x vocab_size");
  }
  create_parameters();
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Parameter& dst = params_[i];
    if (!params.contains(dst.name)) throw std::invalid_argument("missing parameter " + dst.name);
    const Parameter& src = params.get(dst.name);
    if (src.value.rows() != dst.value.rows() || src.value.cols() != dst.value.cols()) {
      throw std::invalid_argument("parameter " + dst.name + " has shape " +
                                  std::to_string(src.value.rows()) + "x" +
                                  std::to_string(src.value.cols()) + ", expected " +
                                  std::to_string(dst.value.rows()) + "x" +
                                  std::to_string(dst.value.cols()));
    }
    dst.value = src.value;
  }
  if (params.size() != params_.size()) {
    throw std::invalid_argument("unexpected extra parameters for this configuration");
  }
  bind();
}

Seq2SeqModel::Seq2SeqModel(const Seq2SeqModel& other)
    : cfg_(other.cfg_), vocab_vad_(other.vocab_vad_), params_(other.params_) {
  bind();
}

Seq2SeqModel& Seq2SeqModel::operator=(const Seq2SeqModel& other) {
  if (this != &other) {
    cfg_ = other.cfg_;
    vocab_vad_ = other.vocab_vad_;
    params_ = other.params_;
    bind();
  }
  return *this;
}

void Seq2SeqModel::create_parameters() {
  const auto V = static_cast<Eigen::Index>(cfg_.vocab_size);
  const Eigen::Index E = cfg_.embed_dim, H = cfg_.hidden_dim, D = cfg_.decoder_hidden();
  params_.add("embedding", E, V);
  for (std::size_t l = 0; l < cfg_.encoder_layers; ++l) {
    const Eigen::Index in = l == 0 ? E : 2 * H;
    GruParams::create(params_, layer_prefix(l, false), in, H);
    GruParams::create(params_, layer_prefix(l, true), in, H);
  }
  GruParams::create(params_, "dec", cfg_.decoder_input_dim(), D);
  params_.add("out.W", V, D);
  params_.add("out.b", V, 1);
  if (cfg_.variant.see) {
    params_.add("see.A", 3, kNumEmotions);
    params_.add("see.proj", E, 3);
  }
  if (cfg_.variant.sed) params_.add("sed.A", 3, kNumEmotions);
  if (cfg_.variant.we) params_.add("we.lambda", 1, 1);
}

void Seq2SeqModel::bind() {
  h_ = Handles{};
  h_.embedding = &params_.get("embedding");
  for (std::size_t l = 0; l < cfg_.encoder_layers; ++l) {
    h_.encoder.emplace_back(GruParams::bind(params_, layer_prefix(l, false)),
                            GruParams::bind(params_, layer_prefix(l, true)));
  }
  h_.decoder = GruParams::bind(params_, "dec");
  h_.out_w = &params_.get("out.W");
  h_.out_b = &params_.get("out.b");
  if (cfg_.variant.see) {
    h_.see_a = &params_.get("see.A");
    h_.see_proj = &params_.get("see.proj");
  }
  if (cfg_.variant.sed) h_.sed_a = &params_.get("sed.A");
  if (cfg_.variant.we) h_.we_lambda = &params_.get("we.lambda");
}

double Seq2SeqModel::lambda_param() const {
  return h_.we_lambda ? h_.we_lambda->value(0, 0) : 0.0;
}

Vec Seq2SeqModel::encode(std::span<const TokenId> ids, const std::optional<Vec>& see) const {
  if (ids.empty()) throw std::invalid_argument("encode: empty input sequence");
  std::vector<Vec> inputs;
  inputs.reserve(ids.size() + 1);
  if (see) {
    if (see->size() != cfg_.embed_dim) {
      throw std::invalid_argument("encode: SEE prefix has dim " + std::to_string(see->size()) +
                                  ", expected " + std::to_string(cfg_.embed_dim));
    }
    inputs.push_back(*see);
  }
  for (TokenId id : ids) inputs.push_back(h_.embedding->value.col(id));

  const Eigen::Index H = cfg_.hidden_dim;
  std::vector<Vec> fwd, bwd;
  for (const auto& [fp, bp] : h_.encoder) {
    fwd = run_gru(fp, inputs, false);
    bwd = run_gru(bp, inputs, true);
    for (std::size_t t = 0; t < inputs.size(); ++t) {
      inputs[t].resize(2 * H);
      inputs[t] << fwd[t], bwd[t];
    }
  }
  Vec summary(2 * H);
  summary << fwd.back(), bwd.front();
  return summary;
}

Vec Seq2SeqModel::encode_prompt(std::span<const TokenId> ids, const EmotionDistribution& e0) const {
  if (cfg_.variant.see) return encode(ids, see_prefix(h_.see_a->value, h_.see_proj->value, e0));
  return encode(ids);
}

std::pair<Vec, Vec> Seq2SeqModel::decode_step(const Vec& input, const Vec& h_prev) const {
  Vec h = gru_cell_forward(h_.decoder, input, h_prev);
  Vec logits = h_.out_w->value * h + h_.out_b->value.col(0);
  return {std::move(h), std::move(logits)};
}

Vec Seq2SeqModel::decoder_input(TokenId prev, const EmotionDistribution& e0) const {
  Vec emb = h_.embedding->value.col(prev);
  if (cfg_.variant.sed) return sed_decoder_input(h_.sed_a->value, emb, e0);
  return emb;
}

Vec Seq2SeqModel::next_token_probs(const Vec& logits, const AffectiveState& affect) const {
  if (!cfg_.variant.we) return softmax(logits);
  return we_mixture(logits, affect.e_t, vocab_vad_, affect.lambda(cfg_.max_length));
}

double Seq2SeqModel::sequence_log_prob(std::span<const TokenId> src, std::span<const TokenId> tgt,
                                       const EmotionDistribution& e0) const {
  DecodeSession session(*this, src, e0);
  auto state = session.start();
  double total = 0.0;
  for (std::size_t t = 0; t <= tgt.size(); ++t) {
    const TokenId y = t < tgt.size() ? tgt[t] : Vocabulary::kEos;
    total += state.log_probs(y);
    if (t < tgt.size()) state = session.advance(state, y);
  }
  return total;
}

PairLoss Seq2SeqModel::forward_backward(const DialogPair& pair, double mu, double grad_scale,
                                        std::mt19937_64* dropout_rng) {
  return run(pair, mu, grad_scale, dropout_rng);
}

PairLoss Seq2SeqModel::loss(const DialogPair& pair, double mu) const {
  return const_cast<Seq2SeqModel*>(this)->run(pair, mu, 0.0, nullptr);
}

PairLoss Seq2SeqModel::run(const DialogPair& pair, double mu, double grad_scale,
                           std::mt19937_64* rng) {
  if (pair.prompt.empty()) throw std::invalid_argument("pair has an empty prompt");
  const bool grads = grad_scale != 0.0;
  const bool drop = rng != nullptr && cfg_.dropout > 0.0;
  const ModelVariant& var = cfg_.variant;
  const Eigen::Index E = cfg_.embed_dim, H = cfg_.hidden_dim;
  const std::size_t L = cfg_.encoder_layers;

  // ---- encoder ----
  const std::size_t offset = var.see ? 1 : 0;
  const std::size_t n = pair.prompt.size() + offset;
  std::vector<std::vector<Vec>> layer_in(L);
  std::vector<std::vector<Vec>> in_masks(L);  // masks applied to layer inputs
  std::vector<std::vector<GruStepCache>> fcache(L), bcache(L);
  std::vector<Vec> fwd, bwd;

  Vec see_hidden;  // A_SEE * e0
  const Vec e0 = emotion_vector(pair.target_emotion);
  layer_in[0].reserve(n);
  if (var.see) {
    see_hidden = h_.see_a->value * e0;
    layer_in[0].push_back(h_.see_proj->value * see_hidden);
  }
  for (TokenId id : pair.prompt) layer_in[0].push_back(h_.embedding->value.col(id));
  if (drop) {
    in_masks[0].assign(n, Vec());
    for (std::size_t t = offset; t < n; ++t) {
      in_masks[0][t] = dropout_mask(E, cfg_.dropout, *rng);
      layer_in[0][t] = layer_in[0][t].cwiseProduct(in_masks[0][t]);
    }
  }
  for (std::size_t l = 0; l < L; ++l) {
    const auto& [fp, bp] = h_.encoder[l];
    fwd = run_gru(fp, layer_in[l], false, &fcache[l]);
    bwd = run_gru(bp, layer_in[l], true, &bcache[l]);
    if (l + 1 < L) {
      layer_in[l + 1].resize(n);
      if (drop) in_masks[l + 1].resize(n);
      for (std::size_t t = 0; t < n; ++t) {
        Vec o(2 * H);
        o << fwd[t], bwd[t];
        if (drop) {
          in_masks[l + 1][t] = dropout_mask(2 * H, cfg_.dropout, *rng);
          o = o.cwiseProduct(in_masks[l + 1][t]);
        }
        layer_in[l + 1][t] = std::move(o);
      }
    }
  }
  Vec h0(2 * H);
  h0 << fwd.back(), bwd.front();

  // ---- decoder ----
  const std::size_t T = pair.response.size() + 1;
  auto target = [&](std::size_t t) {
    return t < pair.response.size() ? pair.response[t] : Vocabulary::kEos;
  };
  auto input_token = [&](std::size_t t) {
    return t == 0 ? Vocabulary::kSos : pair.response[t - 1];
  };
  Vec e_sed;
  if (var.sed) e_sed = h_.sed_a->value * e0;

  std::vector<GruStepCache> dcache(T);
  std::vector<Vec> dec_masks(drop ? T : 0);
  std::vector<Vec> hs(T + 1);
  std::vector<Vec> lm(T);  // softmax of logits
  hs[0] = h0;
  for (std::size_t t = 0; t < T; ++t) {
    Vec emb = h_.embedding->value.col(input_token(t));
    if (drop) {
      dec_masks[t] = dropout_mask(E, cfg_.dropout, *rng);
      emb = emb.cwiseProduct(dec_masks[t]);
    }
    Vec x(cfg_.decoder_input_dim());
    if (var.sed) {
      x << emb, e_sed;
    } else {
      x = std::move(emb);
    }
    hs[t + 1] = gru_cell_forward(h_.decoder, x, hs[t], &dcache[t]);
    lm[t] = softmax(h_.out_w->value * hs[t + 1] + h_.out_b->value.col(0));
  }

  // ---- loss ----
  std::vector<double> lambdas(T, 1.0);
  std::vector<Vec> emo(var.we ? T : 0);  // softmax(v(E_t))
  std::vector<double> p_target(T);
  if (var.we) {
    AffectiveState st = AffectiveState::start(init_affective_goal(pair.response, vocab_vad_),
                                              lambda_param());
    for (std::size_t t = 0; t < T; ++t) {
      lambdas[t] = st.lambda(cfg_.max_length);
      emo[t] = softmax(v_scores(st.e_t, vocab_vad_));
      p_target[t] = lambdas[t] * lm[t](target(t)) + (1.0 - lambdas[t]) * emo[t](target(t));
      if (t < pair.response.size()) st = update_affective_state(st, target(t), vocab_vad_);
    }
  } else {
    for (std::size_t t = 0; t < T; ++t) p_target[t] = lm[t](target(t));
  }

  PairLoss out;
  for (std::size_t t = 0; t < T; ++t) out.nll -= std::log(std::max(p_target[t], kProbFloor));
  out.nll /= static_cast<double>(T);

  std::vector<Vec> reg_grads;
  if (var.wi) {
    std::vector<TokenId> targets(T);
    for (std::size_t t = 0; t < T; ++t) targets[t] = target(t);
    out.reg = affective_regularizer(lm, targets, vocab_vad_, grads ? &reg_grads : nullptr);
  }
  out.total = total_loss(out.nll, out.reg, var.wi ? mu : 0.0);
  if (!grads) return out;

  // ---- backward ----
  const Mat& Wout = h_.out_w->value;
  std::vector<Vec> dh(T + 1, Vec::Zero(cfg_.decoder_hidden()));
  double d_lambda_param = 0.0;
  const double inv_T = 1.0 / static_cast<double>(T);
  for (std::size_t t = 0; t < T; ++t) {
    const TokenId y = target(t);
    Vec g_lm = Vec::Zero(lm[t].size());
    if (p_target[t] >= kProbFloor) {
      const double g_p = -inv_T / p_target[t] * grad_scale;
      g_lm(y) = lambdas[t] * g_p;
      if (var.we && lambdas[t] < 1.0) {
        // dp/dlambda = lm_y - emo_y; dlambda/dparam = lambda (1 - lambda)
        d_lambda_param += g_p * (lm[t](y) - emo[t](y)) * lambdas[t] * (1.0 - lambdas[t]);
      }
    }
    if (var.wi && !reg_grads.empty()) g_lm += (mu * grad_scale) * reg_grads[t];
    const Vec g_logits = softmax_backward(lm[t], g_lm);
    h_.out_w->grad.noalias() += g_logits * hs[t + 1].transpose();
    h_.out_b->grad.col(0) += g_logits;
    dh[t + 1].noalias() += Wout.transpose() * g_logits;
  }
  if (h_.we_lambda) h_.we_lambda->grad(0, 0) += d_lambda_param;

  Vec carry = Vec::Zero(cfg_.decoder_hidden());
  Vec dx, dh_prev;
  Vec d_esed = Vec::Zero(3);
  for (std::size_t k = T; k-- > 0;) {
    const Vec g = dh[k + 1] + carry;
    gru_cell_backward(h_.decoder, dcache[k], g, dx, dh_prev);
    carry = dh_prev;
    Vec d_emb = dx.head(E);
    if (drop) d_emb = d_emb.cwiseProduct(dec_masks[k]);
    h_.embedding->grad.col(input_token(k)) += d_emb;
    if (var.sed) d_esed += dx.tail(3);
  }
  if (var.sed) h_.sed_a->grad.noalias() += d_esed * e0.transpose();

  // carry is dLoss/dh0 = [d fwd_top(n-1); d bwd_top(0)]
  std::vector<Vec> d_out(n, Vec::Zero(2 * H));
  d_out[n - 1].head(H) += carry.head(H);
  d_out[0].tail(H) += carry.tail(H);
  for (std::size_t l = L; l-- > 0;) {
    const auto& [fp, bp] = h_.encoder[l];
    std::vector<Vec> d_in(n, Vec::Zero(layer_in[l][0].size()));
    Vec c = Vec::Zero(H);
    for (std::size_t t = n; t-- > 0;) {
      gru_cell_backward(fp, fcache[l][t], c + d_out[t].head(H), dx, dh_prev);
      d_in[t] += dx;
      c = dh_prev;
    }
    c.setZero();
    for (std::size_t t = 0; t < n; ++t) {
      gru_cell_backward(bp, bcache[l][t], c + d_out[t].tail(H), dx, dh_prev);
      d_in[t] += dx;
      c = dh_prev;
    }
    if (drop) {
      for (std::size_t t = (l == 0 ? offset : 0); t < n; ++t) {
        d_in[t] = d_in[t].cwiseProduct(in_masks[l][t]);
      }
    }
    if (l > 0) {
      d_out = std::move(d_in);
    } else {
      if (var.see) {
        h_.see_proj->grad.noalias() += d_in[0] * see_hidden.transpose();
        h_.see_a->grad.noalias() += (h_.see_proj->value.transpose() * d_in[0]) * e0.transpose();
      }
      for (std::size_t t = offset; t < n; ++t) {
        h_.embedding->grad.col(pair.prompt[t - offset]) += d_in[t];
      }
    }
  }
  return out;
}

DecodeSession::DecodeSession(const Seq2SeqModel& model, std::span<const TokenId> prompt,
                             const EmotionDistribution& e0)
    : model_(model), e0_(e0), summary_(model.encode_prompt(prompt, e0)) {}

DecodeSession::State DecodeSession::step(Vec h_prev, TokenId input, AffectiveState affect) const {
  auto [h, logits] = model_.decode_step(model_.decoder_input(input, e0_), h_prev);
  State s;
  s.h = std::move(h);
  s.probs = model_.next_token_probs(logits, affect);
  s.log_probs = s.probs.array().log();
  // never emitted while decoding
  s.log_probs(Vocabulary::kPad) = -std::numeric_limits<double>::infinity();
  s.log_probs(Vocabulary::kSos) = -std::numeric_limits<double>::infinity();
  s.affect = affect;
  return s;
}

DecodeSession::State DecodeSession::start() const {
  const auto& cfg = model_.config();
  const AffectiveState affect =
      AffectiveState::start(init_affective_goal(e0_, cfg.max_length), model_.lambda_param());
  return step(summary_, Vocabulary::kSos, affect);
}

DecodeSession::State DecodeSession::advance(const State& s, TokenId token) const {
  return step(s.h, token, update_affective_state(s.affect, token, model_.vocab_vad()));
}

}  // namespace affectdialog
