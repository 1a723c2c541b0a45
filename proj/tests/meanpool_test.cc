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
#include "oracles.h"
#include "vtm/error.h"
#include "vtm/meanpool.h"

namespace vtm {
namespace {

TEST_SUITE("meanpool") {

TEST_CASE("temporal mean examples") {
  CHECK(temporal_mean({"rgb", 2, 2, {0, 2, 2, 0}}) == std::vector<double>{1, 1});
  CHECK(temporal_mean({"rgb", 4, 3, std::vector<double>(12, -0.5)}) ==
        std::vector<double>(3, -0.5));
  CHECK_THROWS_AS(temporal_mean({"rgb", 0, 3, {}}), DataError);
}

TEST_CASE("frame order does not change the mean") {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t T = 1 + rng.index(12), D = 1 + rng.index(5);
    FeatureSequence seq{"rgb", T, D, oracle::random_mat(T * D, rng)};
    std::vector<std::size_t> perm(T);
    for (std::size_t t = 0; t < T; ++t) perm[t] = t;
    rng.shuffle(perm);
    FeatureSequence shuffled = seq;
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t d = 0; d < D; ++d) {
        shuffled.values[t * D + d] = seq.values[perm[t] * D + d];
      }
    }
    const auto a = temporal_mean(seq), b = temporal_mean(shuffled);
    for (std::size_t d = 0; d < D; ++d) CHECK(a[d] == doctest::Approx(b[d]).epsilon(1e-14));
  }
}

TEST_CASE("network is an affine map of the concatenated means") {
  MeanPoolConfig cfg{{{"flow", 2}, {"rgb", 3}}, 4};
  MeanPoolNet net(cfg, 5);
  Rng rng(2);
  VideoSample v{"v", 0, {}};
  v.sequences["flow"] = {"flow", 4, 2, oracle::random_mat(8, rng)};
  v.sequences["rgb"] = {"rgb", 7, 3, oracle::random_mat(21, rng)};
  auto feat = temporal_mean(v.sequences["flow"]);
  const auto r = temporal_mean(v.sequences["rgb"]);
  feat.insert(feat.end(), r.begin(), r.end());
  const auto& w = net.classifier_weight().data();
  const auto& b = net.classifier_bias().data();
  const Value out = net.logits(v);
  const auto got = out.data();
  for (std::size_t k = 0; k < 4; ++k) {
    double z = b[k];
    for (std::size_t i = 0; i < 5; ++i) z += feat[i] * w[i * 4 + k];
    CHECK(got[k] == doctest::Approx(z).epsilon(1e-12));
  }
  auto m = make_model(net.manifest(), 0);
  CHECK(m->kind() == "meanpool");
  CHECK(m->num_classes() == 4);
  v.sequences["rgb"].dim = 2;
  CHECK_THROWS_AS(net.check_compatible(v), ConfigError);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(MeanPoolNet(MeanPoolConfig{{}, 3}, 0), ConfigError);
  CHECK_THROWS_AS(MeanPoolNet(MeanPoolConfig{{{"rgb", 3}}, 0}, 0), ConfigError);
}

}  // TEST_SUITE

}  // namespace
}  // namespace vtm
