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
#include "oracles.h"
#include "vtm/checkpoint.h"
#include "vtm/error.h"
#include "vtm/meanpool.h"
#include "vtm/satt.h"
#include "vtm/txn.h"

namespace vtm {
namespace {

VideoSample video(Rng& rng) {
  VideoSample v{"v", 1, {}};
  v.sequences["flow"] = {"flow", 5, 3, oracle::random_mat(15, rng)};
  v.sequences["rgb"] = {"rgb", 9, 4, oracle::random_mat(36, rng)};
  return v;
}

std::vector<std::unique_ptr<Model>> all_kinds() {
  std::vector<std::unique_ptr<Model>> out;
  const std::vector<ModalitySpec> mods{{"flow", 3}, {"rgb", 4}};
  SattNetConfig sc{{{"flow", 3, 2, 1.5}, {"rgb", 4, 1, 1.0}}, 3};
  out.push_back(make_model(SattNet::manifest_for(sc), 1));
  out.push_back(make_model(MeanPoolNet::manifest_for({mods, 3}), 2));
  TxnConfig tc{{{"flow", 3, 8, 4, 3, 5, 1}, {"rgb", 4, 8, 2, 1, 6, 2}}, 3};
  out.push_back(make_model(TxnNet::manifest_for(tc), 3));
  return out;
}

std::string corrupt(std::string bytes, std::size_t at, char c) {
  bytes[at] = c;
  return bytes;
}

TEST_SUITE("checkpoint") {

TEST_CASE("round trip restores every kind exactly") {
  Rng rng(1);
  auto models = all_kinds();
  std::vector<VideoSample> batch{video(rng), video(rng), video(rng)};
  std::vector<const VideoSample*> ptrs{&batch[0], &batch[1], &batch[2]};
  for (auto& m : models) {
    CAPTURE(m->kind());
    m->forward(ptrs, Mode::kTrain);  // moves batch-norm statistics for txn
    const std::string bytes = encode_checkpoint(*m);
    CHECK(bytes.substr(0, 4) == "VTCK");
    auto back = decode_checkpoint(bytes);
    CHECK(back->kind() == m->kind());
    CHECK(back->manifest() == m->manifest());
    CHECK(encode_checkpoint(*back) == bytes);
    const Value a = m->logits(batch[0]);
    const Value b = back->logits(batch[0]);
    CHECK(std::vector<double>(a.data().begin(), a.data().end()) ==
          std::vector<double>(b.data().begin(), b.data().end()));
  }
}

TEST_CASE("malformed bytes are format errors") {
  auto models = all_kinds();
  const std::string good = encode_checkpoint(*models[0]);
  CHECK_THROWS_AS(decode_checkpoint(""), FormatError);
  CHECK_THROWS_AS(decode_checkpoint(corrupt(good, 0, 'X')), FormatError);
  CHECK_THROWS_AS(decode_checkpoint(corrupt(good, 4, 2)), FormatError);
  CHECK_THROWS_AS(decode_checkpoint(good + "x"), FormatError);
  for (std::size_t cut : {5ul, 20ul, good.size() / 2, good.size() - 1}) {
    CHECK_THROWS_AS(decode_checkpoint(good.substr(0, cut)), FormatError);
  }
  // Renaming the first record makes it unknown.
  const auto at = good.find("satt.");
  REQUIRE(at != std::string::npos);
  CHECK_THROWS_AS(decode_checkpoint(corrupt(good, at, 'x')), FormatError);
  CHECK_THROWS_AS(load_checkpoint("/nonexistent/checkpoint.bin"), IoError);
}

}  // TEST_SUITE

}  // namespace
}  // namespace vtm
