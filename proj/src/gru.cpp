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

#include "affectdialog/gru.hpp"

#include <stdexcept>

namespace affectdialog {

GruParams GruParams::create(ParameterStore& store, const std::string& prefix,
                            Eigen::Index input_dim, Eigen::Index hidden_dim) {
  GruParams p;
  p.w = &store.add(prefix + ".W", 3 * hidden_dim, input_dim);
  p.u = &store.add(prefix + ".U", 3 * hidden_dim, hidden_dim);
  p.b = &store.add(prefix + ".b", 3 * hidden_dim, 1);
  p.input_dim = input_dim;
  p.hidden_dim = hidden_dim;
  return p;
}

GruParams GruParams::bind(ParameterStore& store, const std::string& prefix) {
  GruParams p;
  p.w = &store.get(prefix + ".W");
  p.u = &store.get(prefix + ".U");
  p.b = &store.get(prefix + ".b");
  p.hidden_dim = p.u->value.cols();
  p.input_dim = p.w->value.cols();
  return p;
}

namespace {

Vec sigmoid_vec(const Vec& x) {
  return x.unaryExpr([](double v) { return sigmoid(v); });
}

}  // namespace

Vec gru_cell_forward(const GruParams& p, const Vec& x, const Vec& h_prev, GruStepCache* cache) {
  const Eigen::Index H = p.hidden_dim;
  if (x.size() != p.input_dim || h_prev.size() != H) {
    throw std::invalid_argument("gru_cell_forward: expected input " + std::to_string(p.input_dim) +
                                " / hidden " + std::to_string(H) + ", got " +
                                std::to_string(x.size()) + " / " + std::to_string(h_prev.size()));
  }
  const Mat& W = p.w->value;
  const Mat& U = p.u->value;
  const Vec wx = W * x + p.b->value.col(0);
  const Vec uh = U.topRows(2 * H) * h_prev;

  Vec z = sigmoid_vec(wx.segment(0, H) + uh.segment(0, H));
  Vec r = sigmoid_vec(wx.segment(H, H) + uh.segment(H, H));
  Vec n = (wx.segment(2 * H, H) + U.bottomRows(H) * r.cwiseProduct(h_prev)).array().tanh();
  Vec h = (1.0 - z.array()) * n.array() + z.array() * h_prev.array();

  if (cache) {
    cache->x = x;
    cache->h_prev = h_prev;
    cache->z = std::move(z);
    cache->r = std::move(r);
    cache->n = std::move(n);
  }
  return h;
}

void gru_cell_backward(const GruParams& p, const GruStepCache& c, const Vec& grad_h, Vec& grad_x,
                       Vec& grad_h_prev) {
  const Eigen::Index H = p.hidden_dim;
  const Mat& W = p.w->value;
  const Mat& U = p.u->value;

  const Vec dz = grad_h.cwiseProduct(c.h_prev - c.n);
  const Vec dn = grad_h.cwiseProduct((1.0 - c.z.array()).matrix());
  grad_h_prev = grad_h.cwiseProduct(c.z);

  Vec dpre(3 * H);
  auto dz_pre = dpre.segment(0, H);
  auto dr_pre = dpre.segment(H, H);
  auto dn_pre = dpre.segment(2 * H, H);
  dn_pre = dn.array() * (1.0 - c.n.array().square());
  dz_pre = dz.array() * c.z.array() * (1.0 - c.z.array());

  const Vec rh = c.r.cwiseProduct(c.h_prev);
  const Vec d_rh = U.bottomRows(H).transpose() * dn_pre;
  const Vec dr = d_rh.cwiseProduct(c.h_prev);
  grad_h_prev += d_rh.cwiseProduct(c.r);
  dr_pre = dr.array() * c.r.array() * (1.0 - c.r.array());

  p.u->grad.topRows(2 * H).noalias() += dpre.head(2 * H) * c.h_prev.transpose();
  p.u->grad.bottomRows(H).noalias() += dn_pre * rh.transpose();
  grad_h_prev.noalias() += U.topRows(2 * H).transpose() * dpre.head(2 * H);

  p.w->grad.noalias() += dpre * c.x.transpose();
  p.b->grad.col(0) += dpre;
  grad_x.noalias() = W.transpose() * dpre;
}

std::vector<Vec> run_gru(const GruParams& p, std::span<const Vec> inputs, bool backward,
                         std::vector<GruStepCache>* caches) {
  const std::size_t n = inputs.size();
  std::vector<Vec> out(n);
  if (caches) caches->assign(n, {});
  Vec h = Vec::Zero(p.hidden_dim);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t t = backward ? n - 1 - k : k;
    h = gru_cell_forward(p, inputs[t], h, caches ? &(*caches)[t] : nullptr);
    out[t] = h;
  }
  return out;
}

}  // namespace affectdialog
