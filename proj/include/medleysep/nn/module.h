// include/medleysep/nn/module.h

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

#ifndef MEDLEYSEP_NN_MODULE_H_
#define MEDLEYSEP_NN_MODULE_H_

#include <span>
#include <string>
#include <vector>

#include "medleysep/common/random.h"
#include "medleysep/nn/autograd.h"

namespace medleysep::nn {

struct NamedParam {
  std::string name;
  Var var;
};

// Owns an ordered list of named trainable tensors.
class Module {
 public:
  explicit Module(std::string prefix = "") : prefix_(std::move(prefix)) {}
  virtual ~Module() = default;
  Module(const Module&) = delete;
  Module& operator=(const Module&) = delete;

  const std::vector<NamedParam>& parameters() const { return params_; }
  const std::string& prefix() const { return prefix_; }
  void zero_grad();

 protected:
  // Uniform(-bound, bound) entries.
  Var add_uniform(const std::string& name, Shape shape, double bound, Rng& rng);
  Var add_constant(const std::string& name, Shape shape, double value);

 private:
  Var register_param(const std::string& name, Shape shape, Eigen::ArrayXd init);

  std::string prefix_;
  std::vector<NamedParam> params_;
};

std::size_t count_params(std::span<const NamedParam> params);
std::size_t count_params(const Module& module);
// Global l2 norm of the gradients (missing grads count as zero).
double grad_norm(std::span<const NamedParam> params);

// Affine map over the channel axis with default uniform(+-1/sqrt(in)) init.
class Linear : public Module {
 public:
  Linear(std::size_t in, std::size_t out, bool bias, Rng& rng, std::string prefix = "");
  Var forward(const Var& x) const;

 private:
  Var weight_, bias_;
};

}  // namespace medleysep::nn

#endif  // MEDLEYSEP_NN_MODULE_H_
