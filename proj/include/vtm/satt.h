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

// Shifting attention pooling and the multi-group attention network.
//
// One shifting-attention head with parameters (w, a, b) and sharpness alpha
// maps a [T x D] frame matrix X to
//
//   lambda = softmax(alpha * X w)             (length T)
//   satt(X) = (a * lambda X + b) / ||a * lambda X + b||_2
//
// with b added to every coordinate. A group runs N heads over one modality,
// concatenates their outputs and L2-normalizes the concatenation. The network
// concatenates the group vectors in configuration order and applies a
// fully-connected classifier.

#ifndef VTM_SATT_H_
#define VTM_SATT_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vtm/model.h"

namespace vtm {

struct SattHeadParams {
  Value w;  // [D]
  Value a;  // [1]
  Value b;  // [1]

  /// w ~ N(0, 1/D), a = 1, b = 0.
  static SattHeadParams init(std::size_t dim, Rng& rng);
};

struct AttentionGroupConfig {
  std::string modality;
  std::size_t feature_dim = 0;
  std::size_t num_heads = 4;
  double alpha = 1.0;
};

struct SattNetConfig {
  std::vector<AttentionGroupConfig> groups;
  std::size_t num_classes = 0;

  /// Sum over groups of num_heads * feature_dim.
  std::size_t representation_width() const;
  void validate() const;
};

/// One shifting-attention head over X [T x D]; returns [D].
Value satt(const Value& features, const SattHeadParams& head, double alpha);

/// The attention weights lambda of one head; returns [T].
Value satt_weights(const Value& features, const SattHeadParams& head,
                   double alpha);

/// Heads applied to one modality, concatenated, then L2-normalized as a
/// unit; returns [N * D]. Throws ConfigError on an empty head list.
Value attention_group(const Value& features,
                      std::span<const SattHeadParams> heads, double alpha);

class SattNet final : public Model {
 public:
  /// Classifier ~ N(0, 2 / fan_in), bias 0.
  SattNet(SattNetConfig cfg, std::uint64_t seed);

  static KeyValues manifest_for(const SattNetConfig& cfg);
  static SattNetConfig config_from(const KeyValues& manifest);

  std::string kind() const override { return "satt"; }
  std::size_t num_classes() const override { return cfg_.num_classes; }

  Value forward(std::span<const VideoSample* const> batch, Mode mode) override;
  Value logits(const VideoSample& sample) const override;

  /// Concatenated group outputs, [representation_width()].
  Value representation(const VideoSample& sample) const;

  std::vector<NamedParam> parameters() const override;
  KeyValues manifest() const override { return manifest_for(cfg_); }
  void check_compatible(const VideoSample& sample) const override;

  const SattNetConfig& config() const { return cfg_; }
  std::vector<SattHeadParams>& group_heads(std::size_t g) { return heads_[g]; }
  Value& classifier_weight() { return cls_w_; }
  Value& classifier_bias() { return cls_b_; }

 private:
  SattNetConfig cfg_;
  std::vector<std::vector<SattHeadParams>> heads_;
  Value cls_w_;  // [width x K]
  Value cls_b_;  // [K]
};

}  // namespace vtm

#endif  // VTM_SATT_H_
