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

#include "affectdialog/annotations.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>

namespace affectdialog {

double compute_delta_e(const EmotionDistribution& target, const VadVector& annotated) {
  return vad_distance(annotated, emotion_to_vad(target));
}

void validate_annotation(const AnnotationRecord& rec) {
  if (!rec.annotated_vad.is_finite() || !rec.annotated_vad.in_unit_cube()) {
    throw AnnotationError("annotated_vad must lie in [0,1]^3");
  }
  if (!std::isfinite(rec.gamma_used)) throw AnnotationError("gamma_used must be finite");
  const double expected = compute_delta_e(rec.target_emotion, rec.annotated_vad);
  if (!(std::abs(rec.delta_e - expected) <= kDeltaETolerance)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "delta_e " << rec.delta_e << " does not match " << expected;
    throw AnnotationError(msg.str());
  }
}

nlohmann::json annotation_to_json(const AnnotationRecord& rec) {
  const auto& v = rec.annotated_vad;
  return {{"id", rec.id},
          {"prompt", rec.prompt},
          {"response", rec.response},
          {"target_emotion", rec.target_emotion.probs()},
          {"gamma_used", rec.gamma_used},
          {"annotated_vad", {v[0], v[1], v[2]}},
          {"delta_e", rec.delta_e},
          {"timestamp", rec.timestamp}};
}

AnnotationRecord annotation_from_json(const nlohmann::json& j) {
  try {
    AnnotationRecord rec;
    rec.id = j.value("id", std::string());
    rec.prompt = j.at("prompt").get<std::string>();
    rec.response = j.at("response").get<std::string>();
    const auto& target = j.at("target_emotion");
    rec.target_emotion = target.is_string()
                             ? emotion_from_name(target.get<std::string>())
                             : EmotionDistribution(target.get<std::array<double, kNumEmotions>>());
    rec.gamma_used = j.at("gamma_used").get<double>();
    const auto vad = j.at("annotated_vad").get<std::array<double, 3>>();
    rec.annotated_vad = {vad[0], vad[1], vad[2]};
    rec.delta_e = j.at("delta_e").get<double>();
    rec.timestamp = j.value("timestamp", std::string());
    return rec;
  } catch (const nlohmann::json::exception& e) {
    throw AnnotationError(std::string("malformed annotation: ") + e.what());
  } catch (const AnnotationError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw AnnotationError(std::string("malformed annotation: ") + e.what());
  }
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  const auto ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[40];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
  return out;
}

namespace {

std::size_t numeric_suffix(const std::string& id) {
  if (id.size() < 3 || id.compare(0, 2, "a-") != 0) return 0;
  try {
    return std::stoull(id.substr(2));
  } catch (const std::exception&) {
    return 0;
  }
}

}  // namespace

AnnotationStore::AnnotationStore(std::filesystem::path path) : path_(std::move(path)) {
  if (!std::filesystem::exists(path_)) return;
  std::ifstream in(path_, std::ios::binary);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::size_t complete = content.rfind('\n') == std::string::npos ? 0 : content.rfind('\n') + 1;
  if (complete < content.size()) std::filesystem::resize_file(path_, complete);

  std::istringstream lines(content.substr(0, complete));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      AnnotationRecord rec = annotation_from_json(nlohmann::json::parse(line));
      next_id_ = std::max(next_id_, numeric_suffix(rec.id) + 1);
      records_.push_back(std::move(rec));
    } catch (const std::exception& e) {
      throw std::runtime_error(path_.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

std::string AnnotationStore::record(AnnotationRecord rec) {
  validate_annotation(rec);
  rec.delta_e = compute_delta_e(rec.target_emotion, rec.annotated_vad);
  if (rec.timestamp.empty()) rec.timestamp = utc_timestamp();

  std::unique_lock lock(mu_);
  if (rec.id.empty()) {
    rec.id = "a-" + std::to_string(next_id_);
  } else {
    for (const auto& r : records_) {
      if (r.id == rec.id) throw AnnotationError("duplicate annotation id " + rec.id);
    }
  }
  next_id_ = std::max(next_id_, numeric_suffix(rec.id)) + 1;

  const std::string line = annotation_to_json(rec).dump() + "\n";
  const int fd = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd < 0) throw std::runtime_error("cannot open " + path_.string() + ": " + std::strerror(errno));
  std::size_t written = 0;
  while (written < line.size()) {
    const ssize_t n = ::write(fd, line.data() + written, line.size() - written);
    if (n < 0 && errno == EINTR) continue;
    if (n < 0) {
      const int err = errno;
      ::close(fd);
      throw std::runtime_error("cannot append to " + path_.string() + ": " + std::strerror(err));
    }
    written += static_cast<std::size_t>(n);
  }
  ::fsync(fd);
  ::close(fd);

  records_.push_back(rec);
  return rec.id;
}

std::vector<AnnotationRecord> AnnotationStore::records() const {
  std::shared_lock lock(mu_);
  return records_;
}

std::size_t AnnotationStore::size() const {
  std::shared_lock lock(mu_);
  return records_.size();
}

std::vector<double> gamma_grid() {
  std::vector<double> grid(kGammaGridSize);
  for (std::size_t i = 0; i < kGammaGridSize; ++i) {
    grid[i] = kGammaMax * static_cast<double>(i) / static_cast<double>(kGammaGridSize - 1);
  }
  return grid;
}

std::size_t snap_gamma(double gamma) {
  const auto grid = gamma_grid();
  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (std::abs(grid[i] - gamma) < std::abs(grid[best] - gamma)) best = i;
  }
  return best;
}

nlohmann::json GammaCurve::to_json() const {
  nlohmann::json means = nlohmann::json::array();
  for (const auto& m : mean_delta_e) means.push_back(m ? nlohmann::json(*m) : nlohmann::json(nullptr));
  return {{"grid", grid}, {"mean_delta_e", means}, {"counts", counts}};
}

GammaCurve compute_gamma_curve(std::span<const AnnotationRecord> records, const CurveFilter& filter) {
  GammaCurve curve;
  curve.grid = gamma_grid();
  curve.counts.assign(kGammaGridSize, 0);
  std::vector<double> sums(kGammaGridSize, 0.0);
  std::size_t used = 0;
  for (const auto& r : records) {
    if (filter.emotion && r.target_emotion.argmax() != *filter.emotion) continue;
    if (filter.min_vad_norm && !(vad_norm(r.annotated_vad) > *filter.min_vad_norm)) continue;
    const std::size_t bin = snap_gamma(r.gamma_used);
    sums[bin] += r.delta_e;
    ++curve.counts[bin];
    ++used;
  }
  if (used == 0) throw std::invalid_argument("no annotations to build a gamma curve from");
  curve.mean_delta_e.resize(kGammaGridSize);
  for (std::size_t i = 0; i < kGammaGridSize; ++i) {
    if (curve.counts[i]) curve.mean_delta_e[i] = sums[i] / static_cast<double>(curve.counts[i]);
  }
  return curve;
}

double fit_gamma_opt(const GammaCurve& curve) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < curve.mean_delta_e.size(); ++i) {
    if (!curve.mean_delta_e[i]) continue;
    if (!best || *curve.mean_delta_e[i] < *curve.mean_delta_e[*best]) best = i;
  }
  if (!best) throw std::invalid_argument("gamma curve has no populated bin");
  return curve.grid.at(*best);
}

double GammaScheduler::next() {
  return gamma_grid()[counter_.fetch_add(1) % kGammaGridSize];
}

}  // namespace affectdialog
