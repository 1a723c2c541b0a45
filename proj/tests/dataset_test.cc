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
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>

#include "doctest.h"
#include "oracles.h"
#include "vtm/dataset.h"
#include "vtm/error.h"

namespace vtm {
namespace {

VideoSample make_video(const std::string& id, std::size_t label,
                       std::size_t frames, Rng& rng) {
  VideoSample s{id, label, {}};
  s.sequences.emplace("rgb", FeatureSequence{"rgb", frames, 3,
                                             oracle::random_mat(frames * 3, rng)});
  s.sequences.emplace("audio", FeatureSequence{"audio", frames, 2,
                                               oracle::random_mat(frames * 2, rng)});
  return s;
}

std::vector<VideoSample> random_dataset(Rng& rng) {
  std::vector<VideoSample> out;
  const std::size_t n = rng.index(6);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(make_video("v" + std::to_string(i) + "\xc3\xa9", rng.index(9),
                             1 + rng.index(5), rng));
  }
  return out;
}

std::filesystem::path temp_path(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "vtm_unit_dataset";
  std::filesystem::create_directories(dir);
  return dir / name;
}

TEST_SUITE("dataset") {

TEST_CASE("empty dataset is a 12-byte header") {
  const std::string bytes = encode_mmf({});
  CHECK(bytes.size() == 12);
  CHECK(bytes.substr(0, 4) == "MMF1");
  CHECK(decode_mmf(bytes).empty());
}

TEST_CASE("byte layout of a single video") {
  VideoSample s{"ab", 3, {}};
  s.sequences.emplace("m", FeatureSequence{"m", 1, 2, {1.5, -2.0}});
  const VideoSample one[] = {s};
  const std::string b = encode_mmf(one);
  // header 12 + id_len 4 + id 2 + label 4 + n_mod 4 + name_len 4 + name 1 +
  // T 4 + D 4 + 2 floats 8
  CHECK(b.size() == 47);
  std::uint32_t u;
  std::memcpy(&u, b.data() + 8, 4);
  CHECK(u == 1);
  std::memcpy(&u, b.data() + 18, 4);
  CHECK(u == 3);
  float f;
  std::memcpy(&f, b.data() + 39, 4);
  CHECK(f == 1.5f);
}

TEST_CASE("round trip is exact up to float32 rounding") {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    auto ds = random_dataset(rng);
    auto back = decode_mmf(encode_mmf(ds));
    REQUIRE(back.size() == ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
      CHECK(back[i].id == ds[i].id);
      CHECK(back[i].label == ds[i].label);
      REQUIRE(back[i].sequences.size() == ds[i].sequences.size());
      for (const auto& [name, seq] : ds[i].sequences) {
        const auto& got = back[i].modality(name);
        CHECK(got.frames == seq.frames);
        CHECK(got.dim == seq.dim);
        for (std::size_t j = 0; j < seq.values.size(); ++j) {
          CHECK(got.values[j] == static_cast<double>(static_cast<float>(seq.values[j])));
        }
      }
    }
  }
}

TEST_CASE("file round trip") {
  Rng rng(3);
  auto ds = random_dataset(rng);
  ds.push_back(make_video("last", 1, 2, rng));
  const auto path = temp_path("rt.mmf").string();
  write_mmf(path, ds);
  auto back = read_mmf(path);
  CHECK(encode_mmf(back) == encode_mmf(ds));
  CHECK_THROWS_AS(read_mmf(temp_path("missing.mmf").string()), IoError);
}

TEST_CASE("format errors carry byte offsets") {
  Rng rng(5);
  const VideoSample one[] = {make_video("x", 0, 2, rng)};
  const std::string good = encode_mmf(one);

  std::string bad = good;
  bad[0] = 'X';
  try {
    decode_mmf(bad);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.offset() == 0);
  }

  bad = good;
  bad[4] = 2;
  CHECK_THROWS_AS(decode_mmf(bad), FormatError);

  for (std::size_t cut = 0; cut < good.size(); ++cut) {
    CHECK_THROWS_AS(decode_mmf(good.substr(0, cut)), FormatError);
  }
  try {
    decode_mmf(good.substr(0, good.size() - 1));
  } catch (const FormatError& e) {
    CHECK(e.offset() <= good.size());
  }

  CHECK_THROWS_AS(decode_mmf(good + "z"), FormatError);

  bad = good;
  const float nan = std::numeric_limits<float>::quiet_NaN();
  std::memcpy(bad.data() + good.size() - 4, &nan, 4);
  try {
    decode_mmf(bad);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.offset() == good.size() - 4);
  }
}

TEST_CASE("flipping a payload byte of a float still decodes") {
  Rng rng(6);
  const VideoSample one[] = {make_video("x", 0, 2, rng)};
  std::string b = encode_mmf(one);
  b[b.size() - 3] ^= 0x01;
  CHECK(decode_mmf(b).size() == 1);
}

TEST_CASE("validation rejects inconsistent samples") {
  Rng rng(8);
  std::vector<VideoSample> ds{make_video("a", 0, 2, rng), make_video("a", 1, 2, rng)};
  CHECK_THROWS_AS(validate_samples(ds), DataError);
  ds[1].id = "b";
  ds[1].sequences.at("rgb").dim = 4;
  ds[1].sequences.at("rgb").values.resize(8);
  CHECK_THROWS_AS(validate_samples(ds), DataError);
  VideoSample empty{"e", 0, {}};
  const VideoSample just_empty[] = {empty};
  CHECK_THROWS_AS(validate_samples(just_empty), DataError);
  CHECK_THROWS_AS(ds[0].modality("flow"), DataError);
}

TEST_CASE("label file round trip and errors") {
  Rng rng(9);
  std::vector<VideoSample> ds{make_video("a", 4, 1, rng), make_video("b", 0, 1, rng)};
  const auto path = temp_path("labels.csv").string();
  write_labels(path, ds);
  CHECK(read_labels(path) == labels_of(ds));
  {
    std::ofstream out(temp_path("bad_labels.csv"));
    out << "a,1\nb,x\n";
  }
  try {
    read_labels(temp_path("bad_labels.csv").string());
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.offset() == 6);
  }
}

TEST_CASE("batch_iter partitions the data deterministically") {
  Rng rng(10);
  std::vector<VideoSample> ds;
  for (int i = 0; i < 23; ++i) ds.push_back(make_video("v" + std::to_string(i), 0, 1, rng));

  auto epoch = [&](std::size_t bs, std::uint64_t seed) {
    BatchIter it(ds, bs, seed);
    std::vector<std::vector<std::string>> out;
    std::vector<const VideoSample*> b;
    while (it.next(b)) {
      out.emplace_back();
      for (auto* s : b) out.back().push_back(s->id);
    }
    CHECK(out.size() == it.num_batches());
    return out;
  };

  auto e1 = epoch(5, 1);
  CHECK(e1 == epoch(5, 1));
  CHECK(e1 != epoch(5, 2));
  CHECK(e1.size() == 5);
  CHECK(e1.back().size() == 3);
  std::set<std::string> seen;
  std::size_t total = 0;
  for (auto& b : e1) {
    for (auto& id : b) seen.insert(id);
    total += b.size();
  }
  CHECK(total == 23);
  CHECK(seen.size() == 23);

  auto all = epoch(100, 1);
  CHECK(all.size() == 1);
  CHECK(all[0].size() == 23);
  CHECK_THROWS_AS(BatchIter(ds, 0, 1), ConfigError);
}

}  // TEST_SUITE

}  // namespace
}  // namespace vtm
