// include/medleysep/nn/autograd.h

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

#ifndef MEDLEYSEP_NN_AUTOGRAD_H_
#define MEDLEYSEP_NN_AUTOGRAD_H_

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace medleysep::nn {

using Shape = std::vector<std::size_t>;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;

std::size_t shape_size(const Shape& s);
std::string shape_string(const Shape& s);

// A tensor in a dynamically built computation graph. Values are stored
// row-major; the first axis is the channel axis.
struct Node {
  Shape shape;
  Eigen::ArrayXd value;
  Eigen::ArrayXd grad;  // empty until something flows into it
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward;

  std::size_t channels() const { return shape.empty() ? 1 : shape[0]; }
  // Product of the non-channel axes.
  std::size_t inner() const { return shape.empty() ? 1 : shape_size(shape) / shape[0]; }
  Eigen::ArrayXd& ensure_grad();
  ConstMatrixMap matrix() const { return {value.data(), static_cast<Eigen::Index>(channels()),
                                          static_cast<Eigen::Index>(inner())}; }
};

using Var = std::shared_ptr<Node>;

// Leaf tensors. Parameters require gradients, constants do not.
Var constant(Eigen::ArrayXd value, Shape shape);
Var leaf(Eigen::ArrayXd value, Shape shape, bool requires_grad);

// Whether new operations record the graph. Thread-local.
bool grad_enabled();
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

// Builds an op result. The backward closure receives the result node and
// must add into the parents' grads; it is only kept when some parent needs
// gradients and grad mode is on.
Var make_result(Shape shape, Eigen::ArrayXd value, std::vector<Var> parents, std::function<void(Node&)> backward);

// Reverse-mode sweep. Each seed adds its array into the node's grad before
// propagation. Intermediate nodes are released afterwards.
void backward(const std::vector<std::pair<Var, Eigen::ArrayXd>>& seeds);
void backward(const Var& scalar);

}  // namespace medleysep::nn

#endif  // MEDLEYSEP_NN_AUTOGRAD_H_
