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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "affectdialog/gru.hpp"
#include "affectdialog/ops.hpp"

using namespace affectdialog;

namespace {

// Scalar loops straight from the gate equations.
std::vector<double> scalar_gru(const Mat& W, const Mat& U, const Mat& b, const std::vector<double>& x,
                               const std::vector<double>& h) {
  const std::size_t H = h.size(), I = x.size();
  auto gate = [&](std::size_t row, const std::vector<double>& hv) {
    double s = b(static_cast<Eigen::Index>(row), 0);
    for (std::size_t i = 0; i < I; ++i) s += W(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(i)) * x[i];
    for (std::size_t j = 0; j < H; ++j) s += U(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(j)) * hv[j];
    return s;
  };
  std::vector<double> z(H), r(H), out(H);
  for (std::size_t k = 0; k < H; ++k) {
    z[k] = 1.0 / (1.0 + std::exp(-gate(k, h)));
    r[k] = 1.0 / (1.0 + std::exp(-gate(H + k, h)));
  }
  std::vector<double> rh(H);
  for (std::size_t k = 0; k < H; ++k) rh[k] = r[k] * h[k];
  for (std::size_t k = 0; k < H; ++k) {
    const double n = std::tanh(gate(2 * H + k, rh));
    out[k] = (1 - z[k]) * n + z[k] * h[k];
  }
  return out;
}

struct Fixture {
  ParameterStore store;
  GruParams p;
  Fixture(Eigen::Index in, Eigen::Index hid, std::uint64_t seed) {
    p = GruParams::create(store, "cell", in, hid);
    std::mt19937_64 rng(seed);
    for (std::size_t k = 0; k < store.size(); ++k) ParameterStore::init_uniform(store[k], 0.8, rng);
  }
};

Vec random_vec(Eigen::Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  Vec v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST_CASE("softmax and friends") {
  const Vec x = (Vec(3) << 1.0, 2.0, 3.0).finished();
  const Vec p = softmax(x);
  const double z = std::exp(1.0) + std::exp(2.0) + std::exp(3.0);
  CHECK(p(0) == doctest::Approx(std::exp(1.0) / z));
  CHECK(p.sum() == doctest::Approx(1.0));
  CHECK((log_softmax(x) - p.array().log().matrix()).norm() < 1e-12);
  const Vec big = (Vec(2) << 1000.0, 1001.0).finished();
  CHECK(softmax(big).allFinite());
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(sigmoid(-800.0) >= 0.0);
}

TEST_CASE("softmax backward matches finite differences") {
  std::mt19937_64 rng(2);
  const Vec x = random_vec(5, rng), g = random_vec(5, rng);
  const Vec analytic = softmax_backward(softmax(x), g);
  for (Eigen::Index i = 0; i < 5; ++i) {
    Vec up = x, down = x;
    up(i) += 1e-6;
    down(i) -= 1e-6;
    const double fd = (g.dot(softmax(up)) - g.dot(softmax(down))) / 2e-6;
    CHECK(analytic(i) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("nll loss") {
  std::vector<Vec> probs{(Vec(3) << 0.2, 0.5, 0.3).finished(), (Vec(3) << 0.1, 0.1, 0.8).finished()};
  const std::vector<TokenId> targets{1, 2};
  CHECK(nll_loss(probs, targets) == doctest::Approx(-(std::log(0.5) + std::log(0.8)) / 2));
  probs[0] = (Vec(3) << 1.0, 0.0, 0.0).finished();
  CHECK_THROWS_AS(nll_loss(probs, targets), std::domain_error);
}

TEST_CASE("GRU cell matches the scalar oracle") {
  Fixture f(4, 3, 1);
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec x = random_vec(4, rng), h = random_vec(3, rng);
    const Vec got = gru_cell_forward(f.p, x, h);
    const auto expected = scalar_gru(f.p.w->value, f.p.u->value, f.p.b->value,
                                     {x.data(), x.data() + 4}, {h.data(), h.data() + 3});
    for (int k = 0; k < 3; ++k) CHECK(got(k) == doctest::Approx(expected[k]).epsilon(1e-13));
  }
}

TEST_CASE("GRU cell rejects wrong shapes") {
  Fixture f(4, 3, 1);
  CHECK_THROWS_AS(gru_cell_forward(f.p, Vec::Zero(5), Vec::Zero(3)), std::invalid_argument);
  CHECK_THROWS_AS(gru_cell_forward(f.p, Vec::Zero(4), Vec::Zero(2)), std::invalid_argument);
}

TEST_CASE("GRU cell backward matches finite differences") {
  Fixture f(3, 4, 5);
  std::mt19937_64 rng(6);
  const Vec x = random_vec(3, rng), h = random_vec(4, rng), g = random_vec(4, rng);
  const auto objective = [&](const Vec& xx, const Vec& hh) { return g.dot(gru_cell_forward(f.p, xx, hh)); };

  f.store.zero_grad();
  GruStepCache cache;
  gru_cell_forward(f.p, x, h, &cache);
  Vec gx, gh;
  gru_cell_backward(f.p, cache, g, gx, gh);

  const double eps = 1e-6;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vec up = x, down = x;
    up(i) += eps;
    down(i) -= eps;
    CHECK(gx(i) == doctest::Approx((objective(up, h) - objective(down, h)) / (2 * eps)).epsilon(1e-6));
  }
  for (Eigen::Index i = 0; i < h.size(); ++i) {
    Vec up = h, down = h;
    up(i) += eps;
    down(i) -= eps;
    CHECK(gh(i) == doctest::Approx((objective(x, up) - objective(x, down)) / (2 * eps)).epsilon(1e-6));
  }
  for (std::size_t k = 0; k < f.store.size(); ++k) {
    Parameter& p = f.store[k];
    for (Eigen::Index i = 0; i < p.value.size(); ++i) {
      const double orig = p.value.data()[i];
      p.value.data()[i] = orig + eps;
      const double up = objective(x, h);
      p.value.data()[i] = orig - eps;
      const double down = objective(x, h);
      p.value.data()[i] = orig;
      CHECK(p.grad.data()[i] == doctest::Approx((up - down) / (2 * eps)).epsilon(1e-6));
    }
  }
}

TEST_CASE("run_gru directions") {
  Fixture f(2, 3, 8);
  std::mt19937_64 rng(1);
  const std::vector<Vec> xs{random_vec(2, rng), random_vec(2, rng), random_vec(2, rng)};
  const auto fwd = run_gru(f.p, xs, false);
  const auto bwd = run_gru(f.p, xs, true);
  Vec h = Vec::Zero(3);
  for (const auto& x : xs) h = gru_cell_forward(f.p, x, h);
  CHECK((fwd.back() - h).norm() == 0.0);
  h = Vec::Zero(3);
  for (int i = 2; i >= 0; --i) h = gru_cell_forward(f.p, xs[static_cast<std::size_t>(i)], h);
  CHECK((bwd.front() - h).norm() == 0.0);
}
