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

#include "affectdialog/optim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace affectdialog {

Adam::Adam(const ParameterStore& params, AdamConfig cfg) : cfg_(cfg) {
  if (cfg_.lr < 0) throw std::invalid_argument("learning rate must be non-negative");
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_.push_back(Mat::Zero(params[i].value.rows(), params[i].value.cols()));
    v_.push_back(Mat::Zero(params[i].value.rows(), params[i].value.cols()));
  }
}

void Adam::step(ParameterStore& params) {
  if (params.size() != m_.size()) throw std::invalid_argument("Adam: parameter count changed");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i].grad.allFinite()) {
      throw std::domain_error("Adam: non-finite gradient in " + params[i].name);
    }
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = params[i];
    m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * p.grad;
    v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * p.grad.cwiseAbs2();
    const auto m_hat = m_[i].array() / bc1;
    const auto v_hat = v_[i].array() / bc2;
    p.value.array() -= cfg_.lr * (m_hat / (v_hat.sqrt() + cfg_.eps) +
                                  cfg_.weight_decay * p.value.array());
  }
}

double global_grad_norm(const ParameterStore& params) {
  double sq = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) sq += params[i].grad.squaredNorm();
  return std::sqrt(sq);
}

double clip_global_norm(ParameterStore& params, double max_norm) {
  const double norm = global_grad_norm(params);
  if (norm > max_norm && norm > 0.0) {
    const double scale = max_norm / norm;
    for (std::size_t i = 0; i < params.size(); ++i) params[i].grad *= scale;
  }
  return norm;
}

LrScheduler::LrScheduler(std::size_t patience, double factor, double min_lr)
    : patience_(patience), factor_(factor), min_lr_(min_lr) {
  if (patience_ < 1) throw std::invalid_argument("scheduler patience must be >= 1");
  if (!(factor_ > 0.0 && factor_ < 1.0)) throw std::invalid_argument("factor must be in (0,1)");
}

bool LrScheduler::observe(double metric, Adam& optimizer) {
  if (metric < best_) {
    best_ = metric;
    wait_ = 0;
    return true;
  }
  if (++wait_ > patience_) {
    optimizer.set_lr(std::max(min_lr_, optimizer.lr() * factor_));
    wait_ = 0;
  }
  return false;
}

}  // namespace affectdialog
