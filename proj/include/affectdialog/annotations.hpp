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

#include <atomic>
#include <filesystem>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "affectdialog/affect.hpp"

namespace affectdialog {

struct AnnotationRecord {
  std::string id;
  std::string prompt;
  std::string response;
  EmotionDistribution target_emotion;
  double gamma_used = 0.0;
  VadVector annotated_vad;
  double delta_e = 0.0;
  std::string timestamp;  // ISO-8601 UTC

  friend bool operator==(const AnnotationRecord&, const AnnotationRecord&) = default;
};

class AnnotationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kDeltaETolerance = 1e-6;

/// ||annotated - M_VAD * target||_2.
double compute_delta_e(const EmotionDistribution& target, const VadVector& annotated);

/// Throws AnnotationError when the VAD leaves [0,1]^3, gamma is not finite
/// or delta_e disagrees with compute_delta_e by more than kDeltaETolerance.
void validate_annotation(const AnnotationRecord& rec);

nlohmann::json annotation_to_json(const AnnotationRecord& rec);
/// Throws AnnotationError on missing or malformed fields.
AnnotationRecord annotation_from_json(const nlohmann::json& j);

std::string utc_timestamp();

/// Append-only line-delimited store. Appends go through one lock and are
/// flushed to disk before record() returns; readers get a snapshot.
class AnnotationStore {
 public:
  /// Loads existing records. A torn final line (no newline) left by a crash
  /// is dropped; any other malformed line throws std::runtime_error.
  explicit AnnotationStore(std::filesystem::path path);

  /// Validates, assigns id and timestamp when empty, appends. Returns the id.
  std::string record(AnnotationRecord rec);

  std::vector<AnnotationRecord> records() const;
  std::size_t size() const;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  mutable std::shared_mutex mu_;
  std::vector<AnnotationRecord> records_;
  std::size_t next_id_ = 1;
};

inline constexpr std::size_t kGammaGridSize = 20;
inline constexpr double kGammaMax = 10.0;

/// 20 evenly spaced values from 0 to 10 inclusive.
std::vector<double> gamma_grid();

/// Index of the nearest grid point (the smaller one on a tie).
std::size_t snap_gamma(double gamma);

struct GammaCurve {
  std::vector<double> grid;
  std::vector<std::optional<double>> mean_delta_e;  // empty bins have no mean
  std::vector<std::size_t> counts;

  nlohmann::json to_json() const;
};

struct CurveFilter {
  std::optional<Emotion> emotion;    // keep records whose target argmax matches
  std::optional<double> min_vad_norm;  // keep records with ||annotated_vad|| > this
};

/// Mean delta_e per snapped gamma bin. Throws std::invalid_argument when no
/// record survives the filter.
GammaCurve compute_gamma_curve(std::span<const AnnotationRecord> records,
                               const CurveFilter& filter = {});

/// Gamma of the smallest mean over non-empty bins; ties go to the smaller
/// gamma. Throws std::invalid_argument when every bin is empty.
double fit_gamma_opt(const GammaCurve& curve);

/// Hands out grid values in round-robin order so every bin fills evenly.
class GammaScheduler {
 public:
  double next();

 private:
  std::atomic<std::size_t> counter_{0};
};

}  // namespace affectdialog
