// src/nn/autograd.cpp

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

#include "medleysep/nn/autograd.h"

#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace medleysep::nn {
namespace {

thread_local bool g_grad_enabled = true;

}  // namespace

std::size_t shape_size(const Shape& s) {
  return std::accumulate(s.begin(), s.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_string(const Shape& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? ", " : "") + std::to_string(s[i]);
  return out + "]";
}

Eigen::ArrayXd& Node::ensure_grad() {
  if (grad.size() != value.size()) grad = Eigen::ArrayXd::Zero(value.size());
  return grad;
}

Var leaf(Eigen::ArrayXd value, Shape shape, bool requires_grad) {
  if (static_cast<std::size_t>(value.size()) != shape_size(shape))
    throw std::invalid_argument("tensor value size does not match shape " + shape_string(shape));
  auto n = std::make_shared<Node>();
  n->shape = std::move(shape);
  n->value = std::move(value);
  n->requires_grad = requires_grad;
  return n;
}

Var constant(Eigen::ArrayXd value, Shape shape) { return leaf(std::move(value), std::move(shape), false); }

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

Var make_result(Shape shape, Eigen::ArrayXd value, std::vector<Var> parents, std::function<void(Node&)> backward) {
  auto n = leaf(std::move(value), std::move(shape), false);
  if (!g_grad_enabled) return n;
  bool any = false;
  for (const auto& p : parents) any = any || (p && p->requires_grad);
  if (!any) return n;
  n->requires_grad = true;
  n->parents = std::move(parents);
  n->backward = std::move(backward);
  return n;
}

void backward(const std::vector<std::pair<Var, Eigen::ArrayXd>>& seeds) {
  // Iterative post-order DFS gives a topological order.
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, std::size_t>> stack;
  for (const auto& [var, seed] : seeds) {
    if (!var || !var->requires_grad) continue;
    if (seed.size() != var->value.size()) throw std::invalid_argument("backward: seed size mismatch");
    var->ensure_grad() += seed;
    if (visited.insert(var.get()).second) stack.emplace_back(var.get(), 0);
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      if (next < node->parents.size()) {
        Node* p = node->parents[next++].get();
        if (p && p->requires_grad && visited.insert(p).second) stack.emplace_back(p, 0);
      } else {
        order.push_back(node);
        stack.pop_back();
      }
    }
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (!n->backward) continue;
    if (n->grad.size() == 0) n->ensure_grad();
    for (auto& p : n->parents)
      if (p && p->requires_grad) p->ensure_grad();
    n->backward(*n);
  }
  // Drop the graph so intermediate buffers can be freed.
  for (Node* n : order) {
    if (!n->backward) continue;
    n->backward = nullptr;
    n->parents.clear();
  }
}

void backward(const Var& scalar) {
  if (scalar->value.size() != 1) throw std::invalid_argument("backward: expected a scalar");
  backward({{scalar, Eigen::ArrayXd::Ones(1)}});
}

}  // namespace medleysep::nn
