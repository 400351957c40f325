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

#include "affectdialog/affect.hpp"
#include "affectdialog/lexicon.hpp"

namespace affectdialog {

/// Sentence-level emotion labeler. Implementations must be safe to call
/// concurrently.
class EmotionClassifier {
 public:
  virtual ~EmotionClassifier() = default;
  virtual EmotionDistribution classify(std::span<const std::string> tokens) const = 0;
};

struct ClassifierConfig {
  double temperature = 0.15;
};

/// Softmax over negative distances between the mean token VAD and each
/// emotion's VAD column. Empty input yields the uniform distribution.
EmotionDistribution classify_emotion(const ClassifierConfig& cfg, const VadLexicon& lexicon,
                                     std::span<const std::string> tokens);

class VadPrototypeClassifier final : public EmotionClassifier {
 public:
  /// Keeps a reference to `lexicon`, which must outlive the classifier.
  VadPrototypeClassifier(const VadLexicon& lexicon, ClassifierConfig cfg = {});

  EmotionDistribution classify(std::span<const std::string> tokens) const override;

 private:
  const VadLexicon& lexicon_;
  ClassifierConfig cfg_;
};

}  // namespace affectdialog
