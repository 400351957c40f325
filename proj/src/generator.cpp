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

#include "affectdialog/generator.hpp"

#include <cmath>

namespace affectdialog {

EmotionDistribution parse_emotion_spec(const nlohmann::json& j) {
  if (j.is_string()) {
    const auto e = parse_emotion(j.get<std::string>());
    if (!e) throw RequestError("unknown emotion '" + j.get<std::string>() + "'");
    return EmotionDistribution::one_hot(*e);
  }
  if (j.is_array() && j.size() == kNumEmotions) {
    std::array<double, kNumEmotions> p{};
    for (std::size_t i = 0; i < kNumEmotions; ++i) {
      if (!j[i].is_number()) throw RequestError("emotion vector entries must be numbers");
      p[i] = j[i].get<double>();
    }
    try {
      return EmotionDistribution(p);
    } catch (const std::invalid_argument& e) {
      throw RequestError(e.what());
    }
  }
  throw RequestError("emotion must be a name or a 6-vector");
}

GenerationRequest generation_request_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw RequestError("request body must be an object");
  GenerationRequest req;
  if (!j.contains("prompt") || !j["prompt"].is_string()) throw RequestError("missing string field 'prompt'");
  req.prompt = j["prompt"].get<std::string>();
  if (!j.contains("emotion")) throw RequestError("missing field 'emotion'");
  req.emotion = parse_emotion_spec(j["emotion"]);
  if (j.contains("gamma") && !j["gamma"].is_null()) {
    if (!j["gamma"].is_number()) throw RequestError("gamma must be a number");
    req.gamma = j["gamma"].get<double>();
    if (!std::isfinite(*req.gamma)) throw RequestError("gamma must be finite");
  }
  if (j.contains("beam_size") && !j["beam_size"].is_null()) {
    if (!j["beam_size"].is_number_integer() || j["beam_size"].get<long long>() < 1) {
      throw RequestError("beam_size must be a positive integer");
    }
    req.beam_size = j["beam_size"].get<std::size_t>();
  }
  return req;
}

Generator::Generator(LoadedCheckpoint forward, LoadedCheckpoint reverse, VadLexicon lexicon,
                     GeneratorConfig cfg)
    : forward_(std::move(forward)),
      reverse_(std::move(reverse)),
      lexicon_(std::move(lexicon)),
      classifier_(lexicon_),
      cfg_(cfg) {
  if (!forward_.model || !reverse_.model) throw std::invalid_argument("generator needs both models");
  cfg_.weights.validate();
  if (cfg_.default_beam_size < 1 || cfg_.default_beam_size > cfg_.max_beam_size) {
    throw std::invalid_argument("default beam size out of range");
  }
}

namespace {

std::vector<TokenId> encode_truncated(const Vocabulary& vocab, const std::vector<std::string>& words,
                                      std::size_t max_length) {
  std::vector<TokenId> ids = vocab.encode(words);
  if (ids.size() > max_length) ids.resize(max_length);
  return ids;
}

}  // namespace

GenerationResult Generator::generate(const GenerationRequest& req) const {
  const std::vector<std::string> words = normalize_and_tokenize(req.prompt);
  if (words.empty()) throw RequestError("prompt has no tokens");

  GenerationResult out;
  out.emotion = req.emotion;
  out.weights = cfg_.weights;
  if (req.gamma) out.weights.gamma = *req.gamma;
  out.beam_size = req.beam_size.value_or(cfg_.default_beam_size);
  if (out.beam_size > cfg_.max_beam_size) {
    throw RequestError("beam_size exceeds " + std::to_string(cfg_.max_beam_size));
  }

  const Seq2SeqModel& fwd = *forward_.model;
  const std::size_t max_length = fwd.config().max_length;
  const auto src = encode_truncated(forward_.vocab, words, max_length);
  const DecodeSession session(fwd, src, req.emotion);
  out.candidates = beam_search(session, {out.beam_size, max_length, true});
  if (out.candidates.empty()) throw std::runtime_error("beam search produced no candidates");

  const auto rev_target = encode_truncated(reverse_.vocab, words, reverse_.model->config().max_length);
  annotate_candidates(out.candidates, rev_target, *reverse_.model, forward_.vocab, reverse_.vocab,
                      classifier_, req.emotion, cfg_.threads);
  score_candidates(out.candidates, req.emotion, out.weights);
  const Candidate& best = select_final(out.candidates);
  out.selected = static_cast<std::size_t>(&best - out.candidates.data());
  out.response = join_tokens(forward_.vocab.decode(best.response()));
  return out;
}

nlohmann::json Generator::result_to_json(const GenerationResult& r) const {
  nlohmann::json cands = nlohmann::json::array();
  for (const auto& c : r.candidates) cands.push_back(candidate_report(c, forward_.vocab, r.emotion));
  return {{"response", r.response},
          {"selected", r.selected},
          {"emotion", r.emotion.probs()},
          {"gamma", r.weights.gamma},
          {"alpha", r.weights.alpha},
          {"beta", r.weights.beta},
          {"beam_size", r.beam_size},
          {"candidates", cands}};
}

}  // namespace affectdialog
