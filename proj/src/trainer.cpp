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

#include "affectdialog/trainer.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "affectdialog/checkpoint.hpp"

namespace affectdialog {

void TrainConfig::validate() const {
  if (mu < 0) throw std::invalid_argument("mu must be non-negative");
  if (max_length < 2) throw std::invalid_argument("max_length must be >= 2");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (!teacher_forcing) throw std::invalid_argument("only teacher-forced training is supported");
}

EpochReport train_epoch(Seq2SeqModel& model, const Corpus& corpus, Adam& optimizer,
                        const TrainConfig& cfg, std::mt19937_64& rng) {
  cfg.validate();
  EpochReport report;
  if (corpus.empty()) return report;

  std::vector<std::size_t> order(corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  if (cfg.shuffle) order = seeded_permutation(corpus.size(), rng());

  ParameterStore& params = model.params();
  for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
    const std::size_t end = std::min(order.size(), start + cfg.batch_size);
    const double scale = 1.0 / static_cast<double>(end - start);
    params.zero_grad();
    for (std::size_t k = start; k < end; ++k) {
      const DialogPair& pair = corpus.pairs[order[k]];
      const PairLoss l = model.forward_backward(pair, cfg.mu, scale, &rng);
      if (!std::isfinite(l.total)) {
        std::ostringstream msg;
        msg << "non-finite loss at pair " << order[k] << " (nll " << l.nll << ", reg " << l.reg
            << ", lambda_param " << model.lambda_param() << ")";
        throw TrainingError(msg.str());
      }
      report.mean_loss += l.total;
      report.mean_nll += l.nll;
      report.mean_reg += l.reg;
    }
    clip_global_norm(params, cfg.clip_norm);
    optimizer.step(params);
  }
  const double n = static_cast<double>(corpus.size());
  report.pairs = corpus.size();
  report.mean_loss /= n;
  report.mean_nll /= n;
  report.mean_reg /= n;
  return report;
}

EpochReport evaluate_loss(const Seq2SeqModel& model, const Corpus& corpus, double mu) {
  EpochReport report;
  for (const auto& pair : corpus.pairs) {
    const PairLoss l = model.loss(pair, mu);
    report.mean_loss += l.total;
    report.mean_nll += l.nll;
    report.mean_reg += l.reg;
  }
  report.pairs = corpus.size();
  if (report.pairs) {
    const double n = static_cast<double>(report.pairs);
    report.mean_loss /= n;
    report.mean_nll /= n;
    report.mean_reg /= n;
  }
  return report;
}

namespace {

nlohmann::json train_config_to_json(const TrainConfig& cfg) {
  return {{"mu", cfg.mu},
          {"max_length", cfg.max_length},
          {"epochs", cfg.epochs},
          {"batch_size", cfg.batch_size},
          {"lr", cfg.lr},
          {"clip_norm", cfg.clip_norm},
          {"weight_decay", cfg.weight_decay},
          {"patience", cfg.patience},
          {"lr_factor", cfg.lr_factor},
          {"min_lr", cfg.min_lr},
          {"teacher_forcing", cfg.teacher_forcing},
          {"nll_reduction", "token_mean"},
          {"seed", cfg.seed}};
}

}  // namespace

std::vector<EpochRecord> train_model(Seq2SeqModel& model, const Corpus& train, const Corpus& val,
                                     const TrainConfig& cfg, const Vocabulary& vocab,
                                     const std::optional<std::filesystem::path>& run_dir) {
  cfg.validate();
  Adam optimizer(model.params(), {.lr = cfg.lr, .weight_decay = cfg.weight_decay});
  LrScheduler scheduler(cfg.patience, cfg.lr_factor, cfg.min_lr);
  std::mt19937_64 rng(cfg.seed);

  std::ofstream metrics;
  if (run_dir) {
    std::filesystem::create_directories(*run_dir);
    std::ofstream(*run_dir / "config.json")
        << nlohmann::json{{"model", model_config_to_json(model.config())},
                          {"train", train_config_to_json(cfg)},
                          {"train_pairs", train.size()},
                          {"val_pairs", val.size()}}
               .dump(2)
        << '\n';
    vocab.save(*run_dir / "vocab.txt");
    metrics.open(*run_dir / "metrics.jsonl", std::ios::trunc);
  }

  std::vector<EpochRecord> history;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const double lr = optimizer.lr();
    const EpochReport tr = train_epoch(model, train, optimizer, cfg, rng);
    const double val_loss = val.empty() ? tr.mean_loss : evaluate_loss(model, val, cfg.mu).mean_loss;
    const EpochRecord rec{epoch, tr.mean_loss, val_loss, tr.mean_reg, lr};
    history.push_back(rec);

    const bool improved = scheduler.observe(val_loss, optimizer);
    if (run_dir) {
      metrics << nlohmann::json{{"epoch", rec.epoch},
                                {"train_loss", rec.train_loss},
                                {"val_loss", rec.val_loss},
                                {"reg", rec.reg},
                                {"lr", rec.lr}}
                     .dump()
              << '\n';
      metrics.flush();
      if (improved) {
        save_checkpoint(*run_dir / ("epoch-" + std::to_string(epoch) + ".ckpt"), model, vocab);
        save_checkpoint(*run_dir / "best.ckpt", model, vocab);
      }
    }
  }
  if (run_dir) save_checkpoint(*run_dir / "last.ckpt", model, vocab);
  return history;
}

}  // namespace affectdialog
