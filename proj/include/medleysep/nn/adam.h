// include/medleysep/nn/adam.h

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

#ifndef MEDLEYSEP_NN_ADAM_H_
#define MEDLEYSEP_NN_ADAM_H_

#include <map>
#include <span>
#include <string>
#include <vector>

#include "medleysep/nn/module.h"

namespace medleysep::nn {

struct AdamConfig {
  double lr = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
};

// Adam over a fixed parameter list. Moments are keyed by parameter name so
// they can be saved and restored.
class Adam {
 public:
  Adam(std::vector<NamedParam> params, AdamConfig config);

  // One update from the parameters' current grads (missing grads = zero).
  void step();
  void zero_grad();
  // Scales all grads so their global norm is at most max_norm; returns the
  // norm before clipping.
  double clip_grad_norm(double max_norm);

  double lr() const { return config_.lr; }
  void set_lr(double lr) { config_.lr = lr; }
  long steps() const { return t_; }

  struct Moments {
    Eigen::ArrayXd m, v;
  };
  const std::map<std::string, Moments>& state() const { return state_; }
  void load_state(std::map<std::string, Moments> state, long steps);
  const std::vector<NamedParam>& params() const { return params_; }

 private:
  std::vector<NamedParam> params_;
  AdamConfig config_;
  std::map<std::string, Moments> state_;
  long t_ = 0;
};

}  // namespace medleysep::nn

#endif  // MEDLEYSEP_NN_ADAM_H_
