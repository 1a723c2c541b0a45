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
#include "vtm/kv_config.h"

namespace vtm {
namespace {

TEST_SUITE("kv_config") {

TEST_CASE("parses pairs, comments and blank lines") {
  auto kv = parse_key_values("# header\n\nlr = 0.5\nmodel=satt  # trailing\n",
                             "test");
  REQUIRE(kv.size() == 2);
  CHECK(kv[0] == std::pair<std::string, std::string>{"lr", "0.5"});
  CHECK(kv[1] == std::pair<std::string, std::string>{"model", "satt"});
}

TEST_CASE("malformed and duplicate lines name the source and line") {
  try {
    parse_key_values("a = 1\nno equals here\n", "cfg.txt");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("cfg.txt:2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_key_values("a = 1\na = 2\n", "x"), ConfigError);
  CHECK_THROWS_AS(parse_key_values(" = 2\n", "x"), ConfigError);
}

TEST_CASE("format then parse round trips") {
  KeyValues kv{{"kind", "txn"}, {"stream.0", "rgb,16,64,16,3,64,1"}};
  CHECK(parse_key_values(format_key_values(kv), "rt") == kv);
}

TEST_CASE("strict scalar parsing") {
  CHECK(parse_double("1e-3", "k") == 1e-3);
  CHECK(parse_u64("42", "k") == 42u);
  CHECK(parse_size("7", "k") == 7u);
  CHECK_THROWS_AS(parse_double("1.0x", "k"), ConfigError);
  CHECK_THROWS_AS(parse_double("", "k"), ConfigError);
  CHECK_THROWS_AS(parse_u64("-1", "k"), ConfigError);
  CHECK_THROWS_AS(parse_size("3.5", "k"), ConfigError);
}

TEST_CASE("format_double is the shortest round-tripping text") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1e-8) == "1e-08");
  const double x = 0.1 + 0.2;
  CHECK(parse_double(format_double(x), "k") == x);
}

TEST_CASE("require_key and split") {
  KeyValues kv{{"a", "1"}};
  CHECK(require_key(kv, "a") == "1");
  CHECK_THROWS_AS(require_key(kv, "b"), ConfigError);
  CHECK(split(" a , b,c ", ',') == std::vector<std::string>{"a", "b", "c"});
}

}  // TEST_SUITE

}  // namespace
}  // namespace vtm
