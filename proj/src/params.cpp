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

#include "affectdialog/params.hpp"

#include <memory>
#include <stdexcept>

namespace affectdialog {

ParameterStore::ParameterStore(const ParameterStore& other) : index_(other.index_) {
  params_.reserve(other.params_.size());
  for (const auto& p : other.params_) params_.push_back(std::make_unique<Parameter>(*p));
}

ParameterStore& ParameterStore::operator=(const ParameterStore& other) {
  if (this != &other) {
    ParameterStore copy(other);
    *this = std::move(copy);
  }
  return *this;
}

Parameter& ParameterStore::add(const std::string& name, Eigen::Index rows, Eigen::Index cols) {
  if (index_.count(name)) throw std::invalid_argument("duplicate parameter " + name);
  index_.emplace(name, params_.size());
  params_.push_back(
      std::make_unique<Parameter>(Parameter{name, Mat::Zero(rows, cols), Mat::Zero(rows, cols)}));
  return *params_.back();
}

Parameter& ParameterStore::get(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("no parameter named " + name);
  return *params_[it->second];
}

const Parameter& ParameterStore::get(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("no parameter named " + name);
  return *params_[it->second];
}

void ParameterStore::zero_grad() {
  for (auto& p : params_) p->grad.setZero();
}

std::size_t ParameterStore::num_values() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += static_cast<std::size_t>(p->value.size());
  return n;
}

void ParameterStore::init_uniform(Parameter& p, double scale, std::mt19937_64& rng) {
  // raw 53-bit draws, identical across standard library implementations
  for (Eigen::Index i = 0; i < p.value.size(); ++i) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    p.value.data()[i] = (2.0 * u - 1.0) * scale;
  }
}

}  // namespace affectdialog
