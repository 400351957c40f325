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

#include "affectdialog/ops.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace affectdialog {

Vec softmax(const Vec& logits) {
  Vec e = (logits.array() - logits.maxCoeff()).exp();
  return e / e.sum();
}

Vec log_softmax(const Vec& logits) {
  const double top = logits.maxCoeff();
  const double lse = top + std::log((logits.array() - top).exp().sum());
  return logits.array() - lse;
}

Vec softmax_backward(const Vec& probs, const Vec& grad_probs) {
  const double dot = probs.dot(grad_probs);
  return probs.array() * (grad_probs.array() - dot);
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double nll_loss(std::span<const Vec> probs, std::span<const TokenId> targets) {
  if (probs.size() != targets.size()) {
    throw std::invalid_argument("nll_loss: " + std::to_string(probs.size()) + " steps but " +
                                std::to_string(targets.size()) + " targets");
  }
  if (probs.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t t = 0; t < probs.size(); ++t) {
    const double p = probs[t](targets[t]);
    if (!(p >= kProbFloor)) {
      throw std::domain_error("nll_loss: target probability " + std::to_string(p) +
                              " below floor at step " + std::to_string(t));
    }
    sum -= std::log(p);
  }
  return sum / static_cast<double>(probs.size());
}

}  // namespace affectdialog
