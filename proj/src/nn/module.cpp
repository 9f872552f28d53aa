// src/nn/module.cpp

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

#include "medleysep/nn/module.h"

#include <cmath>
#include <stdexcept>

#include "medleysep/nn/ops.h"

namespace medleysep::nn {

void Module::zero_grad() {
  for (auto& p : params_) p.var->grad = Eigen::ArrayXd::Zero(p.var->value.size());
}

Var Module::register_param(const std::string& name, Shape shape, Eigen::ArrayXd init) {
  const std::string full = prefix_ + name;
  for (const auto& p : params_)
    if (p.name == full) throw std::logic_error("duplicate parameter " + full);
  auto v = leaf(std::move(init), std::move(shape), true);
  params_.push_back({full, v});
  return v;
}

Var Module::add_uniform(const std::string& name, Shape shape, double bound, Rng& rng) {
  Eigen::ArrayXd init(static_cast<Eigen::Index>(shape_size(shape)));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (auto& v : init) v = dist(rng);
  return register_param(name, std::move(shape), std::move(init));
}

Var Module::add_constant(const std::string& name, Shape shape, double value) {
  const auto n = static_cast<Eigen::Index>(shape_size(shape));
  return register_param(name, std::move(shape), Eigen::ArrayXd::Constant(n, value));
}

std::size_t count_params(std::span<const NamedParam> params) {
  std::size_t n = 0;
  for (const auto& p : params) n += static_cast<std::size_t>(p.var->value.size());
  return n;
}

std::size_t count_params(const Module& module) { return count_params(module.parameters()); }

double grad_norm(std::span<const NamedParam> params) {
  double sq = 0.0;
  for (const auto& p : params)
    if (p.var->grad.size() == p.var->value.size()) sq += p.var->grad.square().sum();
  return std::sqrt(sq);
}

Linear::Linear(std::size_t in, std::size_t out, bool bias, Rng& rng, std::string prefix) : Module(std::move(prefix)) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  weight_ = add_uniform("weight", {out, in}, bound, rng);
  if (bias) bias_ = add_uniform("bias", {out}, bound, rng);
}

Var Linear::forward(const Var& x) const { return conv1x1(x, weight_, bias_); }

}  // namespace medleysep::nn
