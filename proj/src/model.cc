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


#include "vtm/model.h"

#include <cmath>

#include "vtm/error.h"
#include "vtm/meanpool.h"
#include "vtm/satt.h"
#include "vtm/txn.h"

namespace vtm {

std::unique_ptr<Model> make_model(const KeyValues& manifest,
                                  std::uint64_t seed) {
  const std::string& kind = require_key(manifest, "kind");
  if (kind == "satt") {
    return std::make_unique<SattNet>(SattNet::config_from(manifest), seed);
  }
  if (kind == "txn") {
    return std::make_unique<TxnNet>(TxnNet::config_from(manifest), seed);
  }
  if (kind == "meanpool") {
    return std::make_unique<MeanPoolNet>(MeanPoolNet::config_from(manifest),
                                         seed);
  }
  throw ConfigError("unknown model kind '" + kind +
                    "' (expected satt, txn or meanpool)");
}

Value stack_rows(std::span<const Value> rows) {
  if (rows.empty()) throw ShapeError("stack_rows: no rows");
  std::vector<Value> parts;
  parts.reserve(rows.size());
  for (const Value& r : rows) {
    if (r.shape().rank() != 1) {
      throw ShapeError("stack_rows: rows must be rank 1, got " +
                       r.shape().str());
    }
    parts.push_back(reshape(r, Shape{1, r.shape()[0]}));
  }
  return concat(parts, 0);
}

void check_modalities(const VideoSample& sample,
                      std::span<const ModalitySpec> expected) {
  for (const ModalitySpec& m : expected) {
    auto it = sample.sequences.find(m.name);
    if (it == sample.sequences.end()) {
      throw ConfigError("video '" + sample.id + "' lacks modality '" + m.name +
                        "' required by the model");
    }
    if (it->second.dim != m.dim) {
      throw ConfigError("modality '" + m.name + "' has dim " +
                        std::to_string(it->second.dim) +
                        " in the data but the model expects " +
                        std::to_string(m.dim));
    }
  }
}

std::vector<double> normal_init(std::size_t n, double variance, Rng& rng) {
  const double sd = std::sqrt(variance);
  std::vector<double> v(n);
  for (double& x : v) x = rng.normal(0.0, sd);
  return v;
}

}  // namespace vtm
