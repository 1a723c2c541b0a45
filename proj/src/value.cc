// Copyright 2026 The vtm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vtm/value.h"

#include <algorithm>
#include <unordered_set>
#include <utility>

#include "vtm/error.h"

namespace vtm {

Shape::Shape(std::initializer_list<std::size_t> dims)
    : Shape(std::vector<std::size_t>(dims)) {}

Shape::Shape(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
  if (dims_.empty() || dims_.size() > 3) {
    throw ShapeError("shape rank must be 1..3, got " +
                     std::to_string(dims_.size()));
  }
  for (std::size_t d : dims_) {
    if (d == 0) throw ShapeError("shape extents must be >= 1: " + str());
  }
}

std::size_t Shape::numel() const {
  std::size_t n = 1;
  for (std::size_t d : dims_) n *= d;
  return n;
}

std::string Shape::str() const {
  std::string s = "[";
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(dims_[i]);
  }
  return s + "]";
}

Node::Node(Shape s, std::vector<double> d, bool rg)
    : shape(std::move(s)), data(std::move(d)), requires_grad(rg) {
  if (data.size() != shape.numel()) {
    throw ShapeError("data length " + std::to_string(data.size()) +
                     " does not match shape " + shape.str());
  }
  grad.assign(data.size(), 0.0);
}

Value Value::constant(Shape shape, std::vector<double> data) {
  return Value(std::make_shared<Node>(std::move(shape), std::move(data), false));
}

Value Value::parameter(Shape shape, std::vector<double> data) {
  return Value(std::make_shared<Node>(std::move(shape), std::move(data), true));
}

Value Value::zeros(Shape shape, bool requires_grad) {
  std::vector<double> data(shape.numel(), 0.0);
  return Value(
      std::make_shared<Node>(std::move(shape), std::move(data), requires_grad));
}

Value Value::from_op(Shape shape, std::vector<double> data, const char* op,
                     std::vector<Value> parents) {
  bool rg = false;
  for (const Value& p : parents) rg = rg || p.requires_grad();
  auto node = std::make_shared<Node>(std::move(shape), std::move(data), rg);
  node->op = op;
  node->parents.reserve(parents.size());
  for (Value& p : parents) node->parents.push_back(std::move(p.node_));
  return Value(std::move(node));
}

double Value::item() const {
  if (numel() != 1) {
    throw UsageError("item() on value of shape " + shape().str());
  }
  return node_->data[0];
}

void Value::zero_grad() {
  std::fill(node_->grad.begin(), node_->grad.end(), 0.0);
}

namespace {

// Post-order (parents before children) over nodes reachable from root.
std::vector<Node*> topo_order(Node* root) {
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, std::size_t>> stack;
  stack.emplace_back(root, 0);
  seen.insert(root);
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node* parent = node->parents[next++].get();
      if (seen.insert(parent).second) stack.emplace_back(parent, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  return order;
}

}  // namespace

void backward(const Value& root) {
  if (!root.defined() || root.numel() != 1) {
    throw UsageError("backward() requires a scalar root, got " +
                     (root.defined() ? root.shape().str() : "undefined"));
  }
  std::vector<Node*> order = topo_order(&root.node());
  for (Node* n : order) {
    if (!n->parents.empty()) std::fill(n->grad.begin(), n->grad.end(), 0.0);
  }
  root.node().grad[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->requires_grad && n->backward) n->backward(*n);
  }
}

void zero_grads(std::span<Value> values) {
  for (Value& v : values) v.zero_grad();
}

double min_kink_margin(const Value& root) {
  double margin = std::numeric_limits<double>::infinity();
  for (Node* n : topo_order(&root.node())) {
    margin = std::min(margin, n->kink_margin);
  }
  return margin;
}

}  // namespace vtm
