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
#include <vector>

#include <Eigen/Dense>

#include "affectdialog/text.hpp"

namespace affectdialog {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kProbFloor = 1e-12;

Vec softmax(const Vec& logits);
Vec log_softmax(const Vec& logits);

/// Backward of softmax: given p = softmax(x) and dL/dp, returns dL/dx.
Vec softmax_backward(const Vec& probs, const Vec& grad_probs);

double sigmoid(double x);

/// Mean over steps of -log p_t(target_t). `probs[t]` must be normalized.
/// Throws std::domain_error when a target probability is below 1e-12.
double nll_loss(std::span<const Vec> probs, std::span<const TokenId> targets);

}  // namespace affectdialog
