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
#include <filesystem>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "affectdialog/corpus.hpp"
#include "affectdialog/model.hpp"
#include "affectdialog/optim.hpp"

namespace affectdialog {

/// Reference training settings.
namespace defaults {
inline constexpr double kForwardLr = 0.001;
inline constexpr double kReverseLr = 0.01;
inline constexpr double kClipNorm = 5.0;
inline constexpr double kWeightDecay = 1e-5;
inline constexpr double kDropout = 0.2;
inline constexpr std::size_t kPatience = 20;
inline constexpr double kLrFactor = 0.5;
inline constexpr double kMinLr = 1e-6;
inline constexpr double kTrainFrac = 0.94;
inline constexpr double kValFrac = 0.01;
inline constexpr double kTestFrac = 0.05;
inline constexpr std::size_t kMaxLengthCornell = 20;
inline constexpr std::size_t kMaxLengthOpenSubtitles = 30;
inline constexpr std::size_t kVocabularySize = 42000;
inline constexpr Eigen::Index kEmbedDim = 300;
inline constexpr Eigen::Index kEncoderHidden = 256;  // decoder: 512
inline constexpr std::size_t kEncoderLayers = 2;
inline constexpr double kMu = 0.1;
}  // namespace defaults

struct TrainConfig {
  double mu = defaults::kMu;
  std::size_t max_length = defaults::kMaxLengthCornell;
  std::size_t epochs = 10;
  std::size_t batch_size = 32;
  double lr = defaults::kForwardLr;
  double clip_norm = defaults::kClipNorm;
  double weight_decay = defaults::kWeightDecay;
  std::size_t patience = defaults::kPatience;
  double lr_factor = defaults::kLrFactor;
  double min_lr = defaults::kMinLr;
  bool teacher_forcing = true;  // the only supported mode
  bool shuffle = true;
  std::uint64_t seed = 0;

  void validate() const;
};

struct EpochReport {
  double mean_loss = 0.0;
  double mean_nll = 0.0;
  double mean_reg = 0.0;
  std::size_t pairs = 0;
};

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One teacher-forced pass: per batch forward, loss per variant flags,
/// backward, global-norm clipping and an ADAM step. Dropout masks and the
/// pair order are drawn from `rng`. Throws TrainingError on a non-finite
/// loss, naming the pair and the loss terms.
EpochReport train_epoch(Seq2SeqModel& model, const Corpus& corpus, Adam& optimizer,
                        const TrainConfig& cfg, std::mt19937_64& rng);

/// Mean loss without dropout or updates.
EpochReport evaluate_loss(const Seq2SeqModel& model, const Corpus& corpus, double mu);

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double reg = 0.0;
  double lr = 0.0;
};

/// Full training with reduce-on-plateau scheduling on validation loss
/// (training loss when `val` is empty). With `run_dir`, writes config.json,
/// metrics.jsonl (one record per epoch), vocab.txt, a checkpoint per
/// scheduler improvement (epoch-N.ckpt), best.ckpt and last.ckpt.
std::vector<EpochRecord> train_model(Seq2SeqModel& model, const Corpus& train, const Corpus& val,
                                     const TrainConfig& cfg, const Vocabulary& vocab,
                                     const std::optional<std::filesystem::path>& run_dir = {});

}  // namespace affectdialog
