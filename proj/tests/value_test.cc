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


#include <cmath>

#include "doctest.h"
#include "vtm/error.h"
#include "vtm/ops.h"
#include "vtm/value.h"

namespace vtm {
namespace {

TEST_SUITE("value") {

TEST_CASE("shape rejects bad rank and zero extents") {
  CHECK_THROWS_AS(Shape(std::vector<std::size_t>{}), ShapeError);
  CHECK_THROWS_AS(Shape({1, 2, 3, 4}), ShapeError);
  CHECK_THROWS_AS(Shape({3, 0}), ShapeError);
  Shape s{2, 3, 4};
  CHECK(s.rank() == 3);
  CHECK(s.numel() == 24);
  CHECK(s.str() == "[2x3x4]");
}

TEST_CASE("data length must match the shape") {
  CHECK_THROWS_AS(Value::parameter(Shape{2}, {1.0}), ShapeError);
}

TEST_CASE("sum gives a gradient of ones") {
  Value x = Value::parameter(Shape{2, 3}, {1, 2, 3, 4, 5, 6});
  backward(sum(x));
  for (double g : x.grad()) CHECK(g == 1.0);
}

TEST_CASE("dot(x, x) gives 2x") {
  Value x = Value::parameter(Shape{3}, {1.5, -2.0, 0.25});
  backward(dot(x, x));
  CHECK(x.grad()[0] == 3.0);
  CHECK(x.grad()[1] == -4.0);
  CHECK(x.grad()[2] == 0.5);
}

TEST_CASE("leaf gradients accumulate across calls until zeroed") {
  Value x = Value::parameter(Shape{2}, {1.0, 2.0});
  Value y = dot(x, x);
  backward(y);
  backward(y);
  CHECK(x.grad()[0] == 4.0);
  CHECK(x.grad()[1] == 8.0);
  Value params[] = {x};
  zero_grads(params);
  CHECK(x.grad()[0] == 0.0);
  backward(y);
  CHECK(x.grad()[1] == 4.0);
}

TEST_CASE("shared subexpressions sum their contributions") {
  Value x = Value::parameter(Shape{2}, {3.0, -1.0});
  Value s = add(x, x);
  backward(dot(s, s));  // 4 * |x|^2
  CHECK(x.grad()[0] == doctest::Approx(24.0));
  CHECK(x.grad()[1] == doctest::Approx(-8.0));
}

TEST_CASE("constants receive no gradient") {
  Value c = Value::constant(Shape{2}, {1.0, 2.0});
  Value x = Value::parameter(Shape{2}, {3.0, 4.0});
  backward(dot(c, x));
  CHECK(c.grad()[0] == 0.0);
  CHECK(x.grad()[0] == 1.0);
  CHECK(x.grad()[1] == 2.0);
}

TEST_CASE("backward requires a scalar root") {
  Value x = Value::parameter(Shape{2}, {1.0, 2.0});
  CHECK_THROWS_AS(backward(x), UsageError);
  CHECK_THROWS_AS(x.item(), UsageError);
}

TEST_CASE("kink margin is infinite for smooth graphs and finite after relu") {
  Value x = Value::parameter(Shape{3}, {0.5, -0.25, 2.0});
  CHECK(std::isinf(min_kink_margin(sum(x))));
  CHECK(min_kink_margin(sum(relu(x))) == 0.25);
}

}  // TEST_SUITE

}  // namespace
}  // namespace vtm
