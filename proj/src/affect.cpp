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

#include "affectdialog/affect.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace affectdialog {

namespace {

constexpr std::array<std::string_view, kNumEmotions> kNames = {
    "anger", "surprise", "joy", "sadness", "fear", "disgust"};

// Rows V, A, D; columns in Emotion order.
constexpr double kVadMatrix[3][kNumEmotions] = {
    {0.0, 1.0, 1.0, 0.0, 0.0, 0.0},
    {1.0, 1.0, 1.0, 0.0, 1.0, 0.5},
    {1.0, 0.0, 1.0, 0.0, 0.0, 0.5},
};

}  // namespace

std::string_view emotion_name(Emotion e) { return kNames[static_cast<std::size_t>(e)]; }

std::optional<Emotion> parse_emotion(std::string_view name) {
  for (std::size_t i = 0; i < kNumEmotions; ++i) {
    if (kNames[i] == name) return static_cast<Emotion>(i);
  }
  return std::nullopt;
}

bool VadVector::is_finite() const {
  return std::isfinite(v) && std::isfinite(a) && std::isfinite(d);
}

bool VadVector::in_unit_cube() const {
  auto in = [](double x) { return x >= 0.0 && x <= 1.0; };
  return in(v) && in(a) && in(d);
}

EmotionDistribution::EmotionDistribution() { p_.fill(1.0 / kNumEmotions); }

EmotionDistribution::EmotionDistribution(const std::array<double, kNumEmotions>& p) : p_(p) {
  double sum = 0.0;
  for (double x : p_) {
    if (!(x >= 0.0 && x <= 1.0)) {
      throw std::invalid_argument("emotion probability outside [0,1]: " + std::to_string(x));
    }
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("emotion probabilities sum to " + std::to_string(sum));
  }
}

EmotionDistribution EmotionDistribution::one_hot(Emotion e) {
  std::array<double, kNumEmotions> p{};
  p[static_cast<std::size_t>(e)] = 1.0;
  return EmotionDistribution(p);
}

Emotion EmotionDistribution::argmax() const {
  return static_cast<Emotion>(std::distance(p_.begin(), std::max_element(p_.begin(), p_.end())));
}

VadVector emotion_column(Emotion e) {
  const auto i = static_cast<std::size_t>(e);
  return {kVadMatrix[0][i], kVadMatrix[1][i], kVadMatrix[2][i]};
}

VadVector emotion_to_vad(const EmotionDistribution& e) {
  VadVector out;
  for (std::size_t i = 0; i < kNumEmotions; ++i) {
    out.v += kVadMatrix[0][i] * e[i];
    out.a += kVadMatrix[1][i] * e[i];
    out.d += kVadMatrix[2][i] * e[i];
  }
  return out;
}

double vad_norm(const VadVector& x) { return std::sqrt(x.v * x.v + x.a * x.a + x.d * x.d); }

double vad_distance(const VadVector& x, const VadVector& y) { return vad_norm(x - y); }

double emotion_distance(const EmotionDistribution& x, const EmotionDistribution& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < kNumEmotions; ++i) {
    const double diff = x[i] - y[i];
    s += diff * diff;
  }
  return std::sqrt(s);
}

EmotionDistribution emotion_from_name(std::string_view name) {
  auto e = parse_emotion(name);
  if (!e) throw std::invalid_argument("unknown emotion name: " + std::string(name));
  return EmotionDistribution::one_hot(*e);
}

}  // namespace affectdialog
