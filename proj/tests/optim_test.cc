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
#include "vtm/optim.h"
#include "vtm/rng.h"

namespace vtm {
namespace {

TEST_SUITE("optim") {

TEST_CASE("zero gradient leaves parameters unchanged") {
  std::vector<double> p{1.0, -2.0, 3.5}, v(3, 0.0);
  const std::vector<double> g(3, 0.0), p0 = p;
  sgd_momentum_step(p, g, v, {});
  CHECK(p == p0);
  AdamState st;
  for (int i = 0; i < 5; ++i) adam_step(p, g, st, {});
  CHECK(p == p0);
  CHECK(st.step == 5);
}

TEST_CASE("plain gradient step with unit rate") {
  std::vector<double> p{1.0, 2.0}, v(2, 0.0);
  const std::vector<double> g{1.0, 1.0};
  sgd_momentum_step(p, g, v, {1.0, 0.0});
  CHECK(p == std::vector<double>{0.0, 1.0});
}

TEST_CASE("momentum accumulates velocity") {
  std::vector<double> p{0.0}, v{0.0};
  const std::vector<double> g{1.0};
  sgd_momentum_step(p, g, v, {0.1, 0.9});
  sgd_momentum_step(p, g, v, {0.1, 0.9});
  CHECK(v[0] == doctest::Approx(1.9));
  CHECK(p[0] == doctest::Approx(-0.1 - 0.19));
}

TEST_CASE("first Adam step moves each coordinate by about lr") {
  Rng rng(1);
  for (double scale : {1e-6, 1e-2, 1.0, 1e3}) {
    std::vector<double> p(8, 0.0), g(8);
    for (double& x : g) x = scale * (rng.uniform() + 0.1) * (rng.uniform() < 0.5 ? -1 : 1);
    AdamState st;
    adam_step(p, g, st, {0.01});
    for (std::size_t i = 0; i < 8; ++i) {
      CHECK(std::abs(p[i]) == doctest::Approx(0.01).epsilon(1e-3));
      CHECK(p[i] * g[i] < 0);
    }
  }
}

TEST_CASE("length mismatch is a shape error") {
  std::vector<double> p(3), v(2), g(3);
  CHECK_THROWS_AS(sgd_momentum_step(p, g, v, {}), ShapeError);
  AdamState st;
  std::vector<double> g2(2);
  CHECK_THROWS_AS(adam_step(p, g2, st, {}), ShapeError);
}

TEST_CASE("optimizers step parameters from accumulated gradients") {
  Value w = Value::parameter(Shape{2}, {1.0, 1.0});
  w.mutable_grad()[0] = 2.0;
  w.mutable_grad()[1] = -4.0;
  SgdMomentum sgd({w}, {0.5, 0.0});
  sgd.step();
  CHECK(w.data()[0] == 0.0);
  CHECK(w.data()[1] == 3.0);
  Adam adam({w}, {0.1});
  adam.step();
  CHECK(w.data()[0] == doctest::Approx(-0.1));
  CHECK(w.data()[1] == doctest::Approx(3.1));
}

}  // TEST_SUITE

}  // namespace
}  // namespace vtm
