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

#include <cstddef>
#include <limits>
#include <vector>

#include "affectdialog/params.hpp"

namespace affectdialog {

struct AdamConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-5;  // decoupled
};

/// ADAM with bias correction and decoupled weight decay:
///   m = b1 m + (1-b1) g;  v = b2 v + (1-b2) g^2
///   p -= lr * (m_hat / (sqrt(v_hat) + eps) + wd * p)
class Adam {
 public:
  Adam(const ParameterStore& params, AdamConfig cfg);

  /// Applies one update using the gradients stored in `params`. Throws
  /// std::domain_error on a non-finite gradient, before touching anything.
  void step(ParameterStore& params);

  double lr() const { return cfg_.lr; }
  void set_lr(double lr) { cfg_.lr = lr; }
  std::size_t steps() const { return t_; }
  const AdamConfig& config() const { return cfg_; }

 private:
  AdamConfig cfg_;
  std::size_t t_ = 0;
  std::vector<Mat> m_;
  std::vector<Mat> v_;
};

double global_grad_norm(const ParameterStore& params);

/// Rescales every gradient by max_norm / norm when the global L2 norm
/// exceeds `max_norm`. Returns the norm before clipping.
double clip_global_norm(ParameterStore& params, double max_norm = 5.0);

/// Reduce-on-plateau: after more than `patience` epochs without a strict
/// improvement the learning rate is multiplied by `factor` (not below min_lr).
class LrScheduler {
 public:
  LrScheduler(std::size_t patience = 20, double factor = 0.5, double min_lr = 1e-6);

  /// Feeds one epoch's metric; returns true when it is a new best.
  bool observe(double metric, Adam& optimizer);

  double best() const { return best_; }
  std::size_t wait() const { return wait_; }
  std::size_t patience() const { return patience_; }
  double factor() const { return factor_; }
  double min_lr() const { return min_lr_; }

 private:
  std::size_t patience_;
  double factor_;
  double min_lr_;
  double best_ = std::numeric_limits<double>::infinity();
  std::size_t wait_ = 0;
};

}  // namespace affectdialog
