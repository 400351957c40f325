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
#include <vector>

#include "affectdialog/params.hpp"

namespace affectdialog {

/// GRU cell weights. Gates are stacked in the order update (z), reset (r),
/// candidate (n):
///   z  = sigmoid(W_z x + U_z h + b_z)
///   r  = sigmoid(W_r x + U_r h + b_r)
///   n  = tanh(W_n x + U_n (r * h) + b_n)
///   h' = (1 - z) * n + z * h
/// The tensors are owned by a ParameterStore.
struct GruParams {
  Parameter* w = nullptr;  // 3H x I
  Parameter* u = nullptr;  // 3H x H
  Parameter* b = nullptr;  // 3H x 1
  Eigen::Index input_dim = 0;
  Eigen::Index hidden_dim = 0;

  /// Registers `<prefix>.W`, `<prefix>.U`, `<prefix>.b` in `store`.
  static GruParams create(ParameterStore& store, const std::string& prefix,
                          Eigen::Index input_dim, Eigen::Index hidden_dim);
  /// Binds to tensors already present in `store`.
  static GruParams bind(ParameterStore& store, const std::string& prefix);
};

/// Activations kept for the backward pass.
struct GruStepCache {
  Vec x;
  Vec h_prev;
  Vec z;
  Vec r;
  Vec n;
};

/// One step. Throws std::invalid_argument on a dimension mismatch.
Vec gru_cell_forward(const GruParams& p, const Vec& x, const Vec& h_prev,
                     GruStepCache* cache = nullptr);

/// Accumulates parameter gradients into p.{w,u,b}->grad and returns the
/// gradients with respect to x and h_prev.
void gru_cell_backward(const GruParams& p, const GruStepCache& cache, const Vec& grad_h,
                       Vec& grad_x, Vec& grad_h_prev);

/// Runs a cell over `inputs` from a zero state, left to right or (when
/// `backward`) right to left. Output i is the state after consuming input i.
std::vector<Vec> run_gru(const GruParams& p, std::span<const Vec> inputs, bool backward,
                         std::vector<GruStepCache>* caches = nullptr);

}  // namespace affectdialog
