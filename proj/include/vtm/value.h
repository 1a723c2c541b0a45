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

// Reverse-mode differentiation graph.
//
// A Value is a cheap handle onto a graph node. Leaves are created with
// Value::constant / Value::parameter; every operator in ops.h creates a new
// node whose parents are its inputs. backward() walks the graph from a scalar
// root and accumulates d(root)/d(node) into the grad buffer of every leaf
// that requires gradients.

#ifndef VTM_VALUE_H_
#define VTM_VALUE_H_

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace vtm {

/// Ordered extents of a dense row-major array. Rank 1 to 3, every extent >= 1.
class Shape {
 public:
  Shape(std::initializer_list<std::size_t> dims);
  explicit Shape(std::vector<std::size_t> dims);

  std::size_t rank() const { return dims_.size(); }
  std::size_t operator[](std::size_t axis) const { return dims_[axis]; }
  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t numel() const;
  std::string str() const;

  friend bool operator==(const Shape&, const Shape&) = default;

 private:
  std::vector<std::size_t> dims_;
};

struct Node;
using NodePtr = std::shared_ptr<Node>;

/// Graph node. Operators fill `backward` with a closure that reads
/// `self.grad` and accumulates into the grads of its parents.
struct Node {
  Node(Shape s, std::vector<double> d, bool rg);

  Shape shape;
  std::vector<double> data;
  std::vector<double> grad;
  bool requires_grad;
  const char* op = "leaf";
  std::vector<NodePtr> parents;
  std::function<void(Node& self)> backward;
  // Distance of the forward pass from a non-differentiable point (ReLU at 0,
  // max-pool ties). Infinity for smooth operators.
  double kink_margin = std::numeric_limits<double>::infinity();
};

class Value {
 public:
  Value() = default;

  /// Leaf that never receives gradients.
  static Value constant(Shape shape, std::vector<double> data);
  /// Leaf that accumulates gradients.
  static Value parameter(Shape shape, std::vector<double> data);
  static Value zeros(Shape shape, bool requires_grad = false);

  /// Used by operator implementations. `requires_grad` is inherited from the
  /// parents.
  static Value from_op(Shape shape, std::vector<double> data, const char* op,
                       std::vector<Value> parents);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  std::size_t numel() const { return node_->data.size(); }
  bool requires_grad() const { return node_->requires_grad; }
  const char* op() const { return node_->op; }

  std::span<const double> data() const { return node_->data; }
  std::span<double> mutable_data() { return node_->data; }
  std::span<const double> grad() const { return node_->grad; }
  std::span<double> mutable_grad() { return node_->grad; }

  /// Scalar value. Throws UsageError unless numel() == 1.
  double item() const;

  void zero_grad();

  Node& node() const { return *node_; }
  const NodePtr& node_ptr() const { return node_; }

 private:
  explicit Value(NodePtr node) : node_(std::move(node)) {}

  NodePtr node_;
};

/// Accumulates d(root)/d(leaf) into every reachable leaf that requires
/// gradients. Intermediate grads are recomputed from scratch on every call,
/// so repeated calls add up at the leaves. Throws UsageError when root is not
/// a single-element value.
void backward(const Value& root);

void zero_grads(std::span<Value> values);

/// Smallest kink margin over all nodes reachable from root.
double min_kink_margin(const Value& root);

}  // namespace vtm

#endif  // VTM_VALUE_H_
