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


#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "doctest.h"
#include "oracles.h"
#include "vtm/error.h"
#include "vtm/ops.h"

namespace vtm {
namespace {

using doctest::Approx;

Value vec(std::vector<double> v) {
  const std::size_t n = v.size();
  return Value::parameter(Shape{n}, std::move(v));
}

Value mat(std::size_t r, std::size_t c, std::vector<double> v) {
  return Value::parameter(Shape{r, c}, std::move(v));
}

std::vector<double> to_vec(const Value& v) {
  return {v.data().begin(), v.data().end()};
}

TEST_SUITE("ops") {

TEST_CASE("softmax_sharp examples") {
  auto p = softmax_sharp(vec({0, 0}), 1.0);
  CHECK(p.data()[0] == 0.5);
  CHECK(p.data()[1] == 0.5);
  p = softmax_sharp(vec({1, 0}), 1.0);
  CHECK(p.data()[0] == Approx(0.73106).epsilon(1e-5));
  CHECK(p.data()[1] == Approx(0.26894).epsilon(1e-5));
  CHECK(p.data()[0] == Approx(std::exp(1.0) / (std::exp(1.0) + 1.0)).epsilon(1e-15));
  p = softmax_sharp(vec({1, 0}), 100.0);
  CHECK(p.data()[0] >= 1.0 - 1e-10);
}

TEST_CASE("softmax_sharp errors") {
  CHECK_THROWS_AS(softmax_sharp(vec({1, 0}), 0.0), ConfigError);
  CHECK_THROWS_AS(softmax_sharp(vec({1, 0}), -1.0), ConfigError);
  CHECK_THROWS_AS(
      softmax_sharp(vec({1, std::numeric_limits<double>::quiet_NaN()}), 1.0),
      NumericDomainError);
  CHECK_THROWS_AS(
      softmax_sharp(vec({std::numeric_limits<double>::infinity(), 0}), 1.0),
      NumericDomainError);
}

TEST_CASE("softmax_sharp sums to one and ignores constant shifts") {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.index(12);
    auto z = oracle::random_mat(n, rng, 3.0);
    const double alpha = rng.uniform(0.1, 20.0);
    const double shift = rng.normal(0.0, 10.0);
    auto p = to_vec(softmax_sharp(vec(z), alpha));
    std::vector<double> zs = z;
    for (double& v : zs) v += shift;
    auto q = to_vec(softmax_sharp(vec(zs), alpha));
    CHECK(std::accumulate(p.begin(), p.end(), 0.0) == Approx(1.0).epsilon(1e-12));
    const auto o = oracle::softmax(z, alpha);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(p[i] > 0.0);
      CHECK(q[i] == Approx(p[i]).epsilon(1e-9));
      CHECK(p[i] == Approx(o[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("l2_normalize examples") {
  auto y = to_vec(l2_normalize(vec({3, 4})));
  CHECK(y[0] == Approx(0.6));
  CHECK(y[1] == Approx(0.8));
  y = to_vec(l2_normalize(vec({1, 1, 1, 1})));
  for (double v : y) CHECK(v == 0.5);
  y = to_vec(l2_normalize(vec({0, 0})));
  CHECK(y[0] == 0.0);
  CHECK(y[1] == 0.0);
}

TEST_CASE("l2_normalize output has unit norm") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    auto v = oracle::random_mat(1 + rng.index(10), rng,
                                std::pow(10.0, rng.uniform(-5.0, 5.0)));
    auto y = to_vec(l2_normalize(vec(v)));
    double n = 0.0;
    for (double x : y) n += x * x;
    CHECK(std::sqrt(n) == Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("l2_normalize gradient of a zero vector is the clamped identity") {
  Value v = vec({0, 0, 0});
  Value r = Value::constant(Shape{3}, {1, 2, 3});
  backward(dot(l2_normalize(v), r));
  CHECK(v.grad()[0] == 1e12);
  CHECK(v.grad()[2] == 3e12);
}

TEST_CASE("matmul examples") {
  Value b = mat(2, 3, {1, 2, 3, 4, 5, 6});
  CHECK(to_vec(matmul(mat(2, 2, {1, 0, 0, 1}), b)) == to_vec(b));
  CHECK(to_vec(matmul(mat(1, 2, {1, 2}), mat(2, 1, {3, 4}))) ==
        std::vector<double>{11.0});
  for (double v : to_vec(matmul(b, mat(3, 2, {0, 0, 0, 0, 0, 0})))) {
    CHECK(v == 0.0);
  }
  CHECK_THROWS_AS(matmul(b, b), ShapeError);
}

TEST_CASE("matmul is exact under permutation of the contracted index") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t k = 2 + rng.index(20);
    auto a = oracle::random_mat(k, rng, 100.0);
    auto b = oracle::random_mat(k, rng, 0.01);
    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    std::vector<double> pa(k), pb(k);
    for (std::size_t i = 0; i < k; ++i) {
      pa[i] = a[perm[i]];
      pb[i] = b[perm[i]];
    }
    const double x = matmul(mat(1, k, a), mat(k, 1, b)).item();
    const double y = matmul(mat(1, k, pa), mat(k, 1, pb)).item();
    CHECK(x == y);
  }
}

TEST_CASE("depthwise_conv1d examples") {
  Value x = mat(3, 1, {1, 2, 3});
  CHECK(to_vec(depthwise_conv1d(x, mat(1, 1, {1}))) == to_vec(x));
  CHECK(to_vec(depthwise_conv1d(x, mat(3, 1, {1, 0, -1}))) ==
        std::vector<double>{-2, -2, 2});
  CHECK_THROWS_AS(depthwise_conv1d(x, mat(2, 1, {1, 1})), ConfigError);
}

TEST_CASE("depthwise_conv1d matches the per-channel oracle") {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t T = 1 + rng.index(10), C = 1 + rng.index(4);
    const std::size_t k = 1 + 2 * rng.index(3);
    auto x = oracle::random_mat(T * C, rng);
    auto kern = oracle::random_mat(k * C, rng);
    auto y = to_vec(depthwise_conv1d(mat(T, C, x), mat(k, C, kern)));
    auto o = oracle::depthwise(x, T, C, kern, k);
    for (std::size_t i = 0; i < y.size(); ++i) CHECK(y[i] == Approx(o[i]).epsilon(1e-12));
  }
}

TEST_CASE("pointwise_conv1d identity, single frame and oracle") {
  Value x = mat(2, 2, {1, 2, 3, 4});
  CHECK(to_vec(pointwise_conv1d(x, mat(2, 2, {1, 0, 0, 1}), vec({0, 0}))) ==
        to_vec(x));
  Value f = mat(1, 2, {1, 2});
  Value W = mat(2, 3, {1, 2, 3, 4, 5, 6});
  Value b = vec({1, 1, 1});
  CHECK(to_vec(pointwise_conv1d(f, W, b)) ==
        to_vec(affine(reshape(f, Shape{2}), W, b)));
  CHECK_THROWS_AS(pointwise_conv1d(x, W, vec({1, 1})), ShapeError);

  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t T = 1 + rng.index(6), Ci = 1 + rng.index(4),
                      Co = 1 + rng.index(4);
    auto xv = oracle::random_mat(T * Ci, rng);
    auto Wv = oracle::random_mat(Ci * Co, rng);
    auto bv = oracle::random_mat(Co, rng);
    auto y = to_vec(pointwise_conv1d(mat(T, Ci, xv), mat(Ci, Co, Wv), vec(bv)));
    auto o = oracle::pointwise(xv, T, Ci, Wv, bv, Co);
    for (std::size_t i = 0; i < y.size(); ++i) CHECK(y[i] == Approx(o[i]).epsilon(1e-12));
  }
}

TEST_CASE("batch_norm train example and running statistics") {
  Value x = Value::parameter(Shape{1, 2, 1}, {0, 2});
  BatchNormState st = BatchNormState::identity(1);
  auto y = batch_norm_train(x, vec({1}), vec({0}), st);
  CHECK(y.data()[0] == Approx(-0.999995).epsilon(1e-6));
  CHECK(y.data()[1] == Approx(0.999995).epsilon(1e-6));
  CHECK(y.data()[1] == Approx(1.0 / std::sqrt(1.0 + 1e-5)).epsilon(1e-15));
  // mean 1, unbiased variance 2.
  CHECK(st.running_mean[0] == Approx(0.1));
  CHECK(st.running_var[0] == Approx(0.9 + 0.2));
}

TEST_CASE("batch_norm gamma zero, infer identity and errors") {
  Rng rng(1);
  Value x = Value::parameter(Shape{2, 3, 2}, oracle::random_mat(12, rng));
  BatchNormState st = BatchNormState::identity(2);
  auto y = batch_norm_train(x, vec({0, 0}), vec({0.5, -1}), st);
  for (std::size_t i = 0; i < 12; ++i) CHECK(y.data()[i] == (i % 2 ? -1.0 : 0.5));
  const BatchNormState id = BatchNormState::identity(2);
  auto z = batch_norm_infer(x, vec({1, 1}), vec({0, 0}), id);
  for (std::size_t i = 0; i < 12; ++i) {
    CHECK(z.data()[i] == Approx(x.data()[i] / std::sqrt(1.0 + 1e-5)));
  }
  BatchNormState s2 = BatchNormState::identity(1);
  CHECK_THROWS_AS(batch_norm_train(Value::parameter(Shape{1, 1, 1}, {1}),
                                   vec({1}), vec({0}), s2),
                  ConfigError);
}

TEST_CASE("batch_norm infer leaves state untouched") {
  Rng rng(2);
  Value x = Value::parameter(Shape{2, 3, 2}, oracle::random_mat(12, rng));
  BatchNormState st{{0.3, -0.2}, {1.5, 0.7}};
  const BatchNormState before = st;
  batch_norm(x, vec({1, 1}), vec({0, 0}), st, Mode::kInfer);
  CHECK(st.running_mean == before.running_mean);
  CHECK(st.running_var == before.running_var);
}

TEST_CASE("adaptive_max_pool1d examples") {
  Value x = mat(4, 1, {1, 3, 2, 5});
  CHECK(to_vec(adaptive_max_pool1d(x, 4)) == to_vec(x));
  CHECK(to_vec(adaptive_max_pool1d(x, 2)) == std::vector<double>{3, 5});
  CHECK(to_vec(adaptive_max_pool1d(mat(5, 1, {1, 4, 2, 2, 3}), 2)) ==
        std::vector<double>{4, 3});
  CHECK_THROWS_AS(adaptive_max_pool1d(x, 5), ConfigError);
}

TEST_CASE("adaptive_max_pool1d routes ties to the first argmax") {
  Value x = mat(4, 1, {2, 2, 1, 1});
  backward(sum(adaptive_max_pool1d(x, 1)));
  CHECK(std::vector<double>(x.grad().begin(), x.grad().end()) ==
        std::vector<double>{1, 0, 0, 0});
}

TEST_CASE("relu, concat, zero_pad_time, global_max_pool_time") {
  CHECK(to_vec(relu(vec({-1, 2}))) == std::vector<double>{0, 2});
  const Value parts[] = {vec({1, 2, 3}), vec({4, 5})};
  CHECK(to_vec(concat(parts, 0)) == std::vector<double>{1, 2, 3, 4, 5});
  const Value bad[] = {mat(2, 1, {1, 2}), mat(3, 1, {1, 2, 3})};
  CHECK_THROWS_AS(concat(bad, 1), ShapeError);

  Value seq = mat(2, 2, {1, 2, 3, 4});
  auto padded = zero_pad_time(seq, 4);
  CHECK(padded.shape() == Shape{4, 2});
  CHECK(to_vec(padded) == std::vector<double>{1, 2, 3, 4, 0, 0, 0, 0});
  CHECK(to_vec(zero_pad_time(seq, 1)) == std::vector<double>{1, 2});
  CHECK(to_vec(zero_pad_time(seq, 2)) == to_vec(seq));

  CHECK(to_vec(global_max_pool_time(mat(3, 2, {1, -5, 7, -2, 3, -9}))) ==
        std::vector<double>{7, -2});
}

TEST_CASE("affine on a vector and on a batch") {
  Value W = mat(2, 2, {1, 2, 3, 4});
  Value b = vec({10, 20});
  CHECK(to_vec(affine(vec({1, 1}), W, b)) == std::vector<double>{14, 26});
  CHECK(to_vec(affine(mat(2, 2, {1, 1, 0, 1}), W, b)) ==
        std::vector<double>{14, 26, 13, 24});
}

TEST_CASE("cross_entropy examples") {
  Value z = Value::parameter(Shape{1, 400}, std::vector<double>(400, 0.25));
  const std::size_t l0[] = {17};
  CHECK(cross_entropy(z, l0).item() == Approx(std::log(400.0)).epsilon(1e-14));
  CHECK(cross_entropy(z, l0).item() == Approx(5.9915).epsilon(1e-4));
  const std::size_t zero[] = {0};
  CHECK(cross_entropy(mat(1, 2, {1, 0}), zero).item() ==
        Approx(0.31326).epsilon(1e-5));
  CHECK(cross_entropy(mat(1, 2, {1000, 0}), zero).item() < 1e-300);
  const std::size_t bad[] = {2};
  CHECK_THROWS_AS(cross_entropy(mat(1, 2, {1, 0}), bad), DataError);
}

TEST_CASE("cross_entropy matches the log-sum-exp oracle") {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t B = 1 + rng.index(5), K = 2 + rng.index(8);
    auto z = oracle::random_mat(B * K, rng, 5.0);
    std::vector<std::size_t> labels(B);
    double expect = 0.0;
    for (std::size_t b = 0; b < B; ++b) {
      labels[b] = rng.index(K);
      expect += oracle::cross_entropy({z.begin() + b * K, z.begin() + (b + 1) * K},
                                      labels[b]);
    }
    CHECK(cross_entropy(mat(B, K, z), labels).item() ==
          Approx(expect / static_cast<double>(B)).epsilon(1e-12));
  }
}

TEST_CASE("graph evaluation is deterministic") {
  Rng a(99), b(99);
  auto xa = oracle::random_mat(24, a);
  auto xb = oracle::random_mat(24, b);
  auto f = [](const std::vector<double>& x) {
    Value v = Value::parameter(Shape{2, 4, 3}, x);
    Value k = Value::constant(Shape{3, 3}, std::vector<double>(9, 0.3));
    return to_vec(global_max_pool_time(relu(depthwise_conv1d(v, k))));
  };
  CHECK(f(xa) == f(xb));
}

}  // TEST_SUITE

}  // namespace
}  // namespace vtm
