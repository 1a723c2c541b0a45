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


#include "vtm/meanpool.h"

#include "vtm/error.h"

namespace vtm {

void MeanPoolConfig::validate() const {
  if (modalities.empty()) {
    throw ConfigError("meanpool: at least one modality required");
  }
  if (num_classes == 0) throw ConfigError("meanpool: num_classes must be >= 1");
  for (const auto& m : modalities) {
    if (m.dim == 0) {
      throw ConfigError("meanpool: modality '" + m.name + "' has dim 0");
    }
  }
}

std::vector<double> temporal_mean(const FeatureSequence& seq) {
  if (seq.frames == 0) {
    throw DataError("meanpool: empty sequence for modality '" + seq.modality +
                    "'");
  }
  std::vector<double> out(seq.dim, 0.0);
  for (std::size_t t = 0; t < seq.frames; ++t) {
    auto f = seq.frame(t);
    for (std::size_t d = 0; d < seq.dim; ++d) out[d] += f[d];
  }
  for (double& v : out) v /= static_cast<double>(seq.frames);
  return out;
}

MeanPoolNet::MeanPoolNet(MeanPoolConfig cfg, std::uint64_t seed)
    : cfg_(std::move(cfg)) {
  cfg_.validate();
  Rng rng(seed);
  std::size_t width = 0;
  for (const auto& m : cfg_.modalities) width += m.dim;
  cls_w_ = Value::parameter(
      Shape{width, cfg_.num_classes},
      normal_init(width * cfg_.num_classes, 2.0 / static_cast<double>(width),
                  rng));
  cls_b_ = Value::zeros(Shape{cfg_.num_classes}, true);
}

Value MeanPoolNet::pooled(const VideoSample& sample) const {
  std::vector<double> feat;
  for (const auto& m : cfg_.modalities) {
    const FeatureSequence& seq = sample.modality(m.name);
    if (seq.dim != m.dim) {
      throw DataError("meanpool: modality '" + m.name + "' has dim " +
                      std::to_string(seq.dim) + ", expected " +
                      std::to_string(m.dim));
    }
    auto mean = temporal_mean(seq);
    feat.insert(feat.end(), mean.begin(), mean.end());
  }
  const std::size_t n = feat.size();
  return Value::constant(Shape{n}, std::move(feat));
}

Value MeanPoolNet::logits(const VideoSample& sample) const {
  return affine(pooled(sample), cls_w_, cls_b_);
}

Value MeanPoolNet::forward(std::span<const VideoSample* const> batch, Mode) {
  std::vector<Value> rows;
  rows.reserve(batch.size());
  for (const VideoSample* s : batch) rows.push_back(pooled(*s));
  return affine(stack_rows(rows), cls_w_, cls_b_);
}

std::vector<NamedParam> MeanPoolNet::parameters() const {
  return {{"meanpool.classifier.weight", cls_w_},
          {"meanpool.classifier.bias", cls_b_}};
}

void MeanPoolNet::check_compatible(const VideoSample& sample) const {
  check_modalities(sample, cfg_.modalities);
}

KeyValues MeanPoolNet::manifest_for(const MeanPoolConfig& cfg) {
  KeyValues kv{{"kind", "meanpool"},
               {"num_classes", std::to_string(cfg.num_classes)},
               {"modalities", std::to_string(cfg.modalities.size())}};
  for (std::size_t i = 0; i < cfg.modalities.size(); ++i) {
    kv.emplace_back("modality." + std::to_string(i),
                    cfg.modalities[i].name + "," +
                        std::to_string(cfg.modalities[i].dim));
  }
  return kv;
}

MeanPoolConfig MeanPoolNet::config_from(const KeyValues& manifest) {
  MeanPoolConfig cfg;
  cfg.num_classes =
      parse_size(require_key(manifest, "num_classes"), "num_classes");
  const std::size_t n =
      parse_size(require_key(manifest, "modalities"), "modalities");
  for (std::size_t i = 0; i < n; ++i) {
    const std::string key = "modality." + std::to_string(i);
    const auto f = split(require_key(manifest, key), ',');
    if (f.size() != 2) throw ConfigError("'" + key + "' must be name,dim");
    cfg.modalities.push_back({f[0], parse_size(f[1], key)});
  }
  cfg.validate();
  return cfg;
}

}  // namespace vtm
