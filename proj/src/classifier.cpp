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

#include "affectdialog/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace affectdialog {

EmotionDistribution classify_emotion(const ClassifierConfig& cfg, const VadLexicon& lexicon,
                                     std::span<const std::string> tokens) {
  if (!(cfg.temperature > 0.0)) throw std::invalid_argument("classifier temperature must be > 0");
  if (tokens.empty()) return EmotionDistribution::uniform();

  VadVector mean;
  for (const auto& t : tokens) mean += lexicon.lookup(t);
  mean *= 1.0 / static_cast<double>(tokens.size());

  std::array<double, kNumEmotions> logits{};
  for (std::size_t i = 0; i < kNumEmotions; ++i) {
    logits[i] = -vad_distance(mean, emotion_column(static_cast<Emotion>(i))) / cfg.temperature;
  }
  const double top = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double& l : logits) {
    l = std::exp(l - top);
    z += l;
  }
  for (double& l : logits) l /= z;
  return EmotionDistribution(logits);
}

VadPrototypeClassifier::VadPrototypeClassifier(const VadLexicon& lexicon, ClassifierConfig cfg)
    : lexicon_(lexicon), cfg_(cfg) {
  if (!(cfg_.temperature > 0.0)) throw std::invalid_argument("classifier temperature must be > 0");
}

EmotionDistribution VadPrototypeClassifier::classify(std::span<const std::string> tokens) const {
  return classify_emotion(cfg_, lexicon_, tokens);
}

}  // namespace affectdialog
