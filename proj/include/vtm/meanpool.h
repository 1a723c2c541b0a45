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


// Mean-pooling baseline: the temporal mean of each modality, concatenated in
// configuration order, followed by a fully-connected classifier.

#ifndef VTM_MEANPOOL_H_
#define VTM_MEANPOOL_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vtm/model.h"

namespace vtm {

struct MeanPoolConfig {
  std::vector<ModalitySpec> modalities;
  std::size_t num_classes = 0;

  void validate() const;
};

/// Temporal mean of a [T x D] sequence. Throws DataError when T = 0.
std::vector<double> temporal_mean(const FeatureSequence& seq);

class MeanPoolNet final : public Model {
 public:
  MeanPoolNet(MeanPoolConfig cfg, std::uint64_t seed);

  static KeyValues manifest_for(const MeanPoolConfig& cfg);
  static MeanPoolConfig config_from(const KeyValues& manifest);

  std::string kind() const override { return "meanpool"; }
  std::size_t num_classes() const override { return cfg_.num_classes; }

  Value forward(std::span<const VideoSample* const> batch, Mode mode) override;
  Value logits(const VideoSample& sample) const override;
  Value pooled(const VideoSample& sample) const;

  std::vector<NamedParam> parameters() const override;
  KeyValues manifest() const override { return manifest_for(cfg_); }
  void check_compatible(const VideoSample& sample) const override;

  Value& classifier_weight() { return cls_w_; }
  Value& classifier_bias() { return cls_b_; }

 private:
  MeanPoolConfig cfg_;
  Value cls_w_;
  Value cls_b_;
};

}  // namespace vtm

#endif  // VTM_MEANPOOL_H_
