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

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace affectdialog {

/// The six Ekman classes, in the order used by every emotion vector.
enum class Emotion : std::size_t {
  kAnger = 0,
  kSurprise = 1,
  kJoy = 2,
  kSadness = 3,
  kFear = 4,
  kDisgust = 5,
};

inline constexpr std::size_t kNumEmotions = 6;

std::string_view emotion_name(Emotion e);
std::optional<Emotion> parse_emotion(std::string_view name);

/// Point in valence-arousal-dominance space. Lexicon entries live in
/// [0,1]^3; goal and state vectors are unbounded.
struct VadVector {
  double v = 0.0;
  double a = 0.0;
  double d = 0.0;

  VadVector& operator+=(const VadVector& o) {
    v += o.v;
    a += o.a;
    d += o.d;
    return *this;
  }
  VadVector& operator-=(const VadVector& o) {
    v -= o.v;
    a -= o.a;
    d -= o.d;
    return *this;
  }
  VadVector& operator*=(double s) {
    v *= s;
    a *= s;
    d *= s;
    return *this;
  }
  friend VadVector operator+(VadVector x, const VadVector& y) { return x += y; }
  friend VadVector operator-(VadVector x, const VadVector& y) { return x -= y; }
  friend VadVector operator*(VadVector x, double s) { return x *= s; }
  friend VadVector operator*(double s, VadVector x) { return x *= s; }
  friend bool operator==(const VadVector&, const VadVector&) = default;

  double operator[](std::size_t i) const { return i == 0 ? v : (i == 1 ? a : d); }

  bool is_finite() const;
  bool in_unit_cube() const;
};

inline constexpr VadVector kNeutralVad{0.5, 0.5, 0.5};

/// Probability distribution over the six emotions.
class EmotionDistribution {
 public:
  /// Uniform distribution.
  EmotionDistribution();

  /// Validates: components in [0,1], sum within 1e-9 of one.
  /// Throws std::invalid_argument otherwise.
  explicit EmotionDistribution(const std::array<double, kNumEmotions>& p);

  static EmotionDistribution one_hot(Emotion e);
  static EmotionDistribution uniform() { return EmotionDistribution(); }

  const std::array<double, kNumEmotions>& probs() const { return p_; }
  double operator[](std::size_t i) const { return p_[i]; }
  double operator[](Emotion e) const { return p_[static_cast<std::size_t>(e)]; }

  Emotion argmax() const;

  friend bool operator==(const EmotionDistribution&, const EmotionDistribution&) = default;

 private:
  std::array<double, kNumEmotions> p_;
};

/// Column i of the fixed emotion-to-VAD matrix (rows V, A, D).
VadVector emotion_column(Emotion e);

/// Maps an emotion distribution into VAD space (linear, M_VAD * e).
VadVector emotion_to_vad(const EmotionDistribution& e);

/// Euclidean distance; used for every affective norm in the system.
double vad_distance(const VadVector& x, const VadVector& y);
double vad_norm(const VadVector& x);

/// L2 distance between two emotion distributions.
double emotion_distance(const EmotionDistribution& x, const EmotionDistribution& y);

/// Resolves a name ("anger", ...) to its one-hot distribution.
/// Throws std::invalid_argument for unknown names.
EmotionDistribution emotion_from_name(std::string_view name);

}  // namespace affectdialog
