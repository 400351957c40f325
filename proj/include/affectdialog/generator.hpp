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
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "affectdialog/checkpoint.hpp"
#include "affectdialog/classifier.hpp"
#include "affectdialog/rerank.hpp"

namespace affectdialog {

class RequestError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct GenerationRequest {
  std::string prompt;
  EmotionDistribution emotion;
  std::optional<double> gamma;
  std::optional<std::size_t> beam_size;
};

/// "emotion" is either one of the six names or a 6-vector. Throws
/// RequestError on anything malformed.
GenerationRequest generation_request_from_json(const nlohmann::json& j);
EmotionDistribution parse_emotion_spec(const nlohmann::json& j);

struct GenerationResult {
  std::string response;
  std::size_t selected = 0;  // index into candidates
  std::vector<Candidate> candidates;
  EmotionDistribution emotion;
  RerankWeights weights;
  std::size_t beam_size = 0;
};

struct GeneratorConfig {
  RerankWeights weights;
  std::size_t default_beam_size = 10;
  std::size_t max_beam_size = 200;
  unsigned threads = 0;  // candidate scoring workers, 0 = hardware concurrency
};

/// Forward model, reverse model and classifier behind one generate() call.
/// All members are read-only after construction, so generate() may run
/// concurrently.
class Generator {
 public:
  Generator(LoadedCheckpoint forward, LoadedCheckpoint reverse, VadLexicon lexicon,
            GeneratorConfig cfg = {});
  Generator(const Generator&) = delete;
  Generator& operator=(const Generator&) = delete;

  /// Tokenize, beam search, annotate with the reverse model and classifier,
  /// score and select. Throws RequestError for a bad request.
  GenerationResult generate(const GenerationRequest& req) const;

  nlohmann::json result_to_json(const GenerationResult& r) const;

  const GeneratorConfig& config() const { return cfg_; }
  const Seq2SeqModel& forward_model() const { return *forward_.model; }
  const Vocabulary& forward_vocab() const { return forward_.vocab; }

 private:
  LoadedCheckpoint forward_;
  LoadedCheckpoint reverse_;
  VadLexicon lexicon_;
  VadPrototypeClassifier classifier_;
  GeneratorConfig cfg_;
};

}  // namespace affectdialog
