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
#include <limits>

#include "affectdialog/optim.hpp"

using namespace affectdialog;

TEST_CASE("Adam follows a hand-computed trace") {
  ParameterStore store;
  Parameter& p = store.add("w", 1, 2);
  p.value << 0.5, -1.0;
  const AdamConfig cfg{.lr = 0.1, .beta1 = 0.9, .beta2 = 0.999, .eps = 1e-8, .weight_decay = 0.01};
  Adam adam(store, cfg);

  double w[2] = {0.5, -1.0}, m[2] = {0, 0}, v[2] = {0, 0};
  const double grads[3][2] = {{0.3, -0.2}, {-0.1, 0.4}, {0.25, 0.0}};
  for (int t = 1; t <= 3; ++t) {
    p.grad << grads[t - 1][0], grads[t - 1][1];
    adam.step(store);
    for (int i = 0; i < 2; ++i) {
      const double g = grads[t - 1][i];
      m[i] = 0.9 * m[i] + 0.1 * g;
      v[i] = 0.999 * v[i] + 0.001 * g * g;
      const double mh = m[i] / (1 - std::pow(0.9, t)), vh = v[i] / (1 - std::pow(0.999, t));
      w[i] -= 0.1 * (mh / (std::sqrt(vh) + 1e-8) + 0.01 * w[i]);
      CHECK(p.value(0, i) == doctest::Approx(w[i]).epsilon(1e-14));
    }
  }
  CHECK(adam.steps() == 3);
}

TEST_CASE("Adam refuses non-finite gradients without touching weights") {
  ParameterStore store;
  Parameter& p = store.add("w", 2, 1);
  p.value << 1.0, 2.0;
  Adam adam(store, {});
  p.grad << 0.1, std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(adam.step(store), std::domain_error);
  CHECK(p.value(0) == 1.0);
  CHECK(adam.steps() == 0);
}

TEST_CASE("global norm clipping") {
  ParameterStore store;
  store.add("a", 1, 1).grad << 3.0;
  store.add("b", 1, 1).grad << 4.0;
  CHECK(global_grad_norm(store) == 5.0);
  CHECK(clip_global_norm(store, 10.0) == 5.0);
  CHECK(store.get("a").grad(0) == 3.0);
  CHECK(clip_global_norm(store, 1.0) == 5.0);
  CHECK(store.get("a").grad(0) == doctest::Approx(0.6));
  CHECK(store.get("b").grad(0) == doctest::Approx(0.8));
  CHECK(global_grad_norm(store) == doctest::Approx(1.0));
}

TEST_CASE("reduce on plateau") {
  ParameterStore store;
  store.add("w", 1, 1);
  Adam adam(store, {.lr = 0.01});
  LrScheduler sched(2, 0.5, 0.004);
  CHECK(sched.observe(1.0, adam));
  CHECK_FALSE(sched.observe(1.0, adam));  // not a strict improvement
  CHECK_FALSE(sched.observe(1.5, adam));
  CHECK(adam.lr() == 0.01);
  CHECK_FALSE(sched.observe(1.2, adam));  // third bad epoch exceeds patience 2
  CHECK(adam.lr() == doctest::Approx(0.005));
  for (int i = 0; i < 3; ++i) sched.observe(2.0, adam);
  CHECK(adam.lr() == doctest::Approx(0.004));  // floored at min_lr
  CHECK(sched.observe(0.5, adam));
  CHECK(sched.wait() == 0);
}

TEST_CASE("default scheduler settings") {
  const LrScheduler s;
  CHECK(s.patience() == 20);
  CHECK(s.factor() == 0.5);
  const AdamConfig a;
  CHECK(a.weight_decay == 1e-5);
}
