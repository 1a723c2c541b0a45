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


#include "doctest.h"
#include "vtm/error.h"
#include "vtm/gradcheck.h"

namespace vtm {
namespace {

TEST_SUITE("gradcheck") {

TEST_CASE("every registered check passes") {
  const auto results = run_gradcheck("all", {});
  CHECK(results.size() == gradcheck_names().size());
  for (const auto& r : results) {
    CAPTURE(r.name);
    CHECK(r.passed);
    CHECK(r.max_rel_error < 1e-4);
    CHECK(r.coordinates > 0);
  }
}

TEST_CASE("an impossible tolerance fails") {
  GradcheckOptions o;
  o.tol = 1e-12;
  bool any_failed = false;
  for (const auto& r : run_gradcheck("all", o)) any_failed |= !r.passed;
  CHECK(any_failed);
}

TEST_CASE("single checks and unknown names") {
  const auto r = run_gradcheck("txn_head", {});
  REQUIRE(r.size() == 1);
  CHECK(r[0].name == "txn_head");
  CHECK_THROWS_WITH_AS(run_gradcheck("conv2d", {}), doctest::Contains("softmax_sharp"),
                       ConfigError);
}

}  // TEST_SUITE

}  // namespace
}  // namespace vtm
