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

#include "vtm/satt.h"

#include <cmath>

#include "vtm/error.h"

namespace vtm {

SattHeadParams SattHeadParams::init(std::size_t dim, Rng& rng) {
  return SattHeadParams{
      Value::parameter(Shape{dim},
                       normal_init(dim, 1.0 / static_cast<double>(dim), rng)),
      Value::parameter(Shape{1}, {1.0}),
      Value::parameter(Shape{1}, {0.0}),
  };
}

std::size_t SattNetConfig::representation_width() const {
  std::size_t w = 0;
  for (const auto& g : groups) w += g.num_heads * g.feature_dim;
  return w;
}

void SattNetConfig::validate() const {
  if (groups.empty()) throw ConfigError("satt: at least one group required");
  if (num_classes == 0) throw ConfigError("satt: num_classes must be >= 1");
  for (const auto& g : groups) {
    if (g.feature_dim == 0) {
      throw ConfigError("satt: group '" + g.modality + "' has feature_dim 0");
    }
    if (g.num_heads == 0) {
      throw ConfigError("satt: group '" + g.modality + "' needs >= 1 head");
    }
    if (!(g.alpha > 0.0) || !std::isfinite(g.alpha)) {
      throw ConfigError("satt: group '" + g.modality +
                        "' alpha must be positive");
    }
  }
}

Value satt_weights(const Value& features, const SattHeadParams& head,
                   double alpha) {
  const Shape& s = features.shape();
  if (s.rank() != 2) {
    throw ShapeError("satt: features must be [T x D], got " + s.str());
  }
  if (head.w.shape().rank() != 1 || head.w.shape()[0] != s[1]) {
    throw ShapeError("satt: w is " + head.w.shape().str() +
                     " but features have D=" + std::to_string(s[1]));
  }
  Value scores = matmul(features, reshape(head.w, Shape{s[1], 1}));
  return softmax_sharp(reshape(scores, Shape{s[0]}), alpha);
}

Value satt(const Value& features, const SattHeadParams& head, double alpha) {
  Value lambda = satt_weights(features, head, alpha);
  const std::size_t T = features.shape()[0];
  const std::size_t D = features.shape()[1];
  Value pooled = reshape(matmul(reshape(lambda, Shape{1, T}), features),
                         Shape{D});
  return l2_normalize(scale_shift(pooled, head.a, head.b));
}

Value attention_group(const Value& features,
                      std::span<const SattHeadParams> heads, double alpha) {
  if (heads.empty()) throw ConfigError("attention_group: no heads");
  std::vector<Value> outs;
  outs.reserve(heads.size());
  for (const SattHeadParams& h : heads) outs.push_back(satt(features, h, alpha));
  return l2_normalize(concat(outs, 0));
}

SattNet::SattNet(SattNetConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg)) {
  cfg_.validate();
  Rng rng(seed);
  for (const auto& g : cfg_.groups) {
    std::vector<SattHeadParams> heads;
    for (std::size_t h = 0; h < g.num_heads; ++h) {
      heads.push_back(SattHeadParams::init(g.feature_dim, rng));
    }
    heads_.push_back(std::move(heads));
  }
  const std::size_t width = cfg_.representation_width();
  cls_w_ = Value::parameter(
      Shape{width, cfg_.num_classes},
      normal_init(width * cfg_.num_classes, 2.0 / static_cast<double>(width),
                  rng));
  cls_b_ = Value::zeros(Shape{cfg_.num_classes}, true);
}

Value SattNet::representation(const VideoSample& sample) const {
  std::vector<Value> parts;
  parts.reserve(cfg_.groups.size());
  for (std::size_t g = 0; g < cfg_.groups.size(); ++g) {
    const AttentionGroupConfig& gc = cfg_.groups[g];
    Value x = sample.modality(gc.modality).as_value();
    parts.push_back(attention_group(x, heads_[g], gc.alpha));
  }
  return concat(parts, 0);
}

Value SattNet::logits(const VideoSample& sample) const {
  return affine(representation(sample), cls_w_, cls_b_);
}

Value SattNet::forward(std::span<const VideoSample* const> batch, Mode) {
  std::vector<Value> rows;
  rows.reserve(batch.size());
  for (const VideoSample* s : batch) rows.push_back(logits(*s));
  return stack_rows(rows);
}

std::vector<NamedParam> SattNet::parameters() const {
  std::vector<NamedParam> out;
  for (std::size_t g = 0; g < heads_.size(); ++g) {
    for (std::size_t h = 0; h < heads_[g].size(); ++h) {
      const std::string p =
          "satt.group" + std::to_string(g) + ".head" + std::to_string(h) + ".";
      out.push_back({p + "w", heads_[g][h].w});
      out.push_back({p + "a", heads_[g][h].a});
      out.push_back({p + "b", heads_[g][h].b});
    }
  }
  out.push_back({"satt.classifier.weight", cls_w_});
  out.push_back({"satt.classifier.bias", cls_b_});
  return out;
}

void SattNet::check_compatible(const VideoSample& sample) const {
  std::vector<ModalitySpec> expected;
  for (const auto& g : cfg_.groups) expected.push_back({g.modality, g.feature_dim});
  check_modalities(sample, expected);
}

KeyValues SattNet::manifest_for(const SattNetConfig& cfg) {
  KeyValues kv{{"kind", "satt"},
               {"num_classes", std::to_string(cfg.num_classes)},
               {"groups", std::to_string(cfg.groups.size())}};
  for (std::size_t g = 0; g < cfg.groups.size(); ++g) {
    const auto& gc = cfg.groups[g];
    kv.emplace_back("group." + std::to_string(g),
                    gc.modality + "," + std::to_string(gc.feature_dim) + "," +
                        std::to_string(gc.num_heads) + "," +
                        format_double(gc.alpha));
  }
  return kv;
}

SattNetConfig SattNet::config_from(const KeyValues& manifest) {
  SattNetConfig cfg;
  cfg.num_classes = parse_size(require_key(manifest, "num_classes"),
                               "num_classes");
  const std::size_t groups =
      parse_size(require_key(manifest, "groups"), "groups");
  for (std::size_t g = 0; g < groups; ++g) {
    const std::string key = "group." + std::to_string(g);
    const auto fields = split(require_key(manifest, key), ',');
    if (fields.size() != 4) {
      throw ConfigError("'" + key + "' must be modality,dim,heads,alpha");
    }
    cfg.groups.push_back({fields[0], parse_size(fields[1], key),
                          parse_size(fields[2], key),
                          parse_double(fields[3], key)});
  }
  cfg.validate();
  return cfg;
}

}  // namespace vtm
