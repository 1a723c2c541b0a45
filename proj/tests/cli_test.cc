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


#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "vtm/checkpoint.h"
#include "vtm/dataset.h"
#include "vtm/score_table.h"

namespace vtm {
namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "vtm_cli_XXXXXX").string();
    path = ::mkdtemp(tmpl.data());
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

int run(const std::string& args) {
  const std::string cmd = std::string(VTM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const char* const kSmall =
    "--classes 3 --videos-per-class 5 --frames 6 --dims rgb:4,flow:3";
const char* const kTrainFlags =
    "--epochs 2 --batch-size 4 --satt-heads 2 --txn-pad-len 6 "
    "--txn-segments 3 --txn-channels 4";

TEST_SUITE("cli") {

TEST_CASE("synthgen, train, eval and fuse work end to end") {
  TempDir dir;
  const std::string data = dir / "data";
  REQUIRE(run("synthgen --out " + data + " " + kSmall) == 0);
  CHECK(read_mmf(data + "/train.mmf").size() == 12);
  CHECK(read_mmf(data + "/val.mmf").size() == 3);
  CHECK(read_labels(data + "/labels.csv").size() == 15);

  for (const char* model : {"satt", "txn", "meanpool"}) {
    CAPTURE(model);
    const std::string out = dir / model;
    REQUIRE(run(std::string("train --model ") + model + " --data " + data +
                " --out " + out + " " + kTrainFlags) == 0);
    CHECK(load_checkpoint(out + "/checkpoint.bin")->kind() == model);
    CHECK(slurp(out + "/metrics.txt").find("top1") != std::string::npos);

    const std::string scores = out + "/eval.csv";
    CHECK(run("eval --checkpoint " + out + "/checkpoint.bin --data " + data +
              " --scores-out " + scores + " --metrics-out " + out + "/eval.txt") == 0);
    CHECK(slurp(scores) == slurp(out + "/scores.csv"));
    CHECK(run("eval --checkpoint " + out + "/checkpoint.bin --data " + data +
              "/val.mmf --threads 3 --scores-out " + scores) == 0);
    CHECK(slurp(scores) == slurp(out + "/scores.csv"));
  }

  const std::string fused = dir / "fused.csv";
  CHECK(run("fuse --scores " + (dir / "satt/scores.csv") + " " +
            (dir / "txn/scores.csv") + " --weights 0.5 0.5 --out " + fused) == 0);
  CHECK(read_score_table(fused).rows.size() == 3);
  CHECK(run("fuse --scores " + (dir / "satt/scores.csv") + " --out " + fused) == 0);
  CHECK(slurp(fused) == slurp(dir / "satt/scores.csv"));
  CHECK(run("fuse --scores " + (dir / "satt/scores.csv") + " " +
            (dir / "txn/scores.csv") + " --weights 0.6 0.5 --out " + fused) == 2);
  CHECK(run("fuse --scores " + (dir / "missing.csv")) == 3);
}

TEST_CASE("training twice produces identical files") {
  TempDir dir;
  const std::string data = dir / "data";
  REQUIRE(run("synthgen --out " + data + " " + kSmall) == 0);
  for (const char* out : {"a", "b"}) {
    REQUIRE(run("train --model txn --data " + data + " --out " + (dir / out) + " " +
                kTrainFlags) == 0);
  }
  for (const char* f : {"checkpoint.bin", "metrics.txt", "scores.csv"}) {
    CAPTURE(f);
    CHECK(slurp(dir / (std::string("a/") + f)) == slurp(dir / (std::string("b/") + f)));
  }
}

TEST_CASE("config files and flag overrides") {
  TempDir dir;
  const std::string data = dir / "data";
  {
    std::ofstream cfg(dir / "synth.cfg");
    cfg << "classes = 2\nvideos_per_class = 5\nframes = 4\ndims = rgb:3\n";
  }
  REQUIRE(run("synthgen --out " + data + " --config " + (dir / "synth.cfg") +
              " --frames 5") == 0);
  const auto train = read_mmf(data + "/train.mmf");
  CHECK(train.size() == 8);
  CHECK(train[0].sequences.at("rgb").frames == 5);
  {
    std::ofstream cfg(dir / "bad.cfg");
    cfg << "colour = red\n";
  }
  CHECK(run("synthgen --out " + data + " --config " + (dir / "bad.cfg")) == 2);
  CHECK(run("train --model meanpool --data " + data + " --out " + (dir / "o") +
            " --config " + (dir / "bad.cfg")) == 2);
}

TEST_CASE("exit codes") {
  TempDir dir;
  CHECK(run("--help") == 0);
  CHECK(run("") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("synthgen --out " + (dir / "d") + " --signal-frames 0") == 2);
  CHECK(run("train --model satt") == 2);
  CHECK(run("train --model satt --data " + (dir / "nowhere") + " --out " + (dir / "o")) == 3);
  CHECK(run("gradcheck --op relu") == 0);
  CHECK(run("gradcheck --op relu --tol 1e-14") == 4);
  CHECK(run("gradcheck --op nope") == 2);
  {
    std::ofstream junk(dir / "junk.bin");
    junk << "not a checkpoint";
  }
  REQUIRE(run("synthgen --out " + (dir / "d") + " " + kSmall) == 0);
  CHECK(run("eval --checkpoint " + (dir / "junk.bin") + " --data " + (dir / "d")) == 3);
}

}  // TEST_SUITE

}  // namespace
}  // namespace vtm
