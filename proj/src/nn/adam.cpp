// src/nn/adam.cpp

// Copyright 2026 The medleysep Authors

// See the top-level LICENSE file for the full license text.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "medleysep/nn/adam.h"

#include <cmath>
#include <stdexcept>

namespace medleysep::nn {

Adam::Adam(std::vector<NamedParam> params, AdamConfig config) : params_(std::move(params)), config_(config) {
  for (const auto& p : params_) {
    const auto n = p.var->value.size();
    state_[p.name] = {Eigen::ArrayXd::Zero(n), Eigen::ArrayXd::Zero(n)};
  }
}

void Adam::zero_grad() {
  for (auto& p : params_) p.var->grad = Eigen::ArrayXd::Zero(p.var->value.size());
}

double Adam::clip_grad_norm(double max_norm) {
  const double norm = grad_norm(params_);
  if (norm > max_norm && norm > 0.0) {
    const double s = max_norm / norm;
    for (auto& p : params_)
      if (p.var->grad.size() == p.var->value.size()) p.var->grad *= s;
  }
  return norm;
}

void Adam::step() {
  ++t_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (auto& p : params_) {
    auto& s = state_.at(p.name);
    Eigen::ArrayXd g = p.var->grad.size() == p.var->value.size() ? p.var->grad
                                                                    : Eigen::ArrayXd::Zero(p.var->value.size());
    if (config_.weight_decay > 0.0) g += config_.weight_decay * p.var->value;
    s.m = config_.beta1 * s.m + (1.0 - config_.beta1) * g;
    s.v = config_.beta2 * s.v + (1.0 - config_.beta2) * g.square();
    p.var->value -= config_.lr * (s.m / c1) / ((s.v / c2).sqrt() + config_.eps);
  }
}

void Adam::load_state(std::map<std::string, Moments> state, long steps) {
  for (const auto& p : params_) {
    auto it = state.find(p.name);
    if (it == state.end()) throw std::invalid_argument("optimizer state lacks parameter " + p.name);
    if (it->second.m.size() != p.var->value.size() || it->second.v.size() != p.var->value.size())
      throw std::invalid_argument("optimizer state shape mismatch for " + p.name);
  }
  state_ = std::move(state);
  t_ = steps;
}

}  // namespace medleysep::nn
