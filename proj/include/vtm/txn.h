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

// Temporal Xception network.
//
// Per stream: zero-pad/truncate to pad_len frames, adaptive max pool to
// num_segments, pointwise entry projection D -> C, num_blocks temporal
// convolution blocks, global max pool over segments. A block computes
//
//   y = x + f(x),  f = (depthwise -> pointwise -> batch norm -> ReLU) x 2
//
// Stream vectors are concatenated in configuration order and classified by a
// fully-connected layer.

#ifndef VTM_TXN_H_
#define VTM_TXN_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vtm/model.h"

namespace vtm {

struct TxnStreamConfig {
  std::string modality;
  std::size_t feature_dim = 0;
  std::size_t pad_len = 64;
  std::size_t num_segments = 16;
  std::size_t kernel_size = 3;
  std::size_t channels = 64;
  std::size_t num_blocks = 1;

  void validate() const;
};

struct TxnConfig {
  std::vector<TxnStreamConfig> streams;
  std::size_t num_classes = 0;

  void validate() const;
};

/// One depthwise-separable layer with its batch norm.
struct SeparableLayerParams {
  Value depthwise;       // [k x C]
  Value pointwise;       // [C x C]
  Value pointwise_bias;  // [C]
  Value gamma;           // [C]
  Value beta;            // [C]
  BatchNormState bn;
};

struct TemporalConvBlockParams {
  std::array<SeparableLayerParams, 2> layers;

  static TemporalConvBlockParams init(std::size_t kernel, std::size_t channels,
                                      Rng& rng);
};

struct TxnStreamParams {
  Value entry_weight;  // [D x C]
  Value entry_bias;    // [C]
  std::vector<TemporalConvBlockParams> blocks;
};

/// Train mode normalizes with batch statistics and updates the running
/// statistics in `params`; infer mode leaves them untouched.
Value temporal_conv_block(const Value& x, TemporalConvBlockParams& params,
                          Mode mode);
/// Infer-mode block.
Value temporal_conv_block(const Value& x, const TemporalConvBlockParams& params);

/// Padding and adaptive pooling of one raw sequence: [num_segments x D].
Value txn_stream_input(const FeatureSequence& seq, const TxnStreamConfig& cfg);

/// One stream over a batch of sequences: [B x C].
Value txn_stream_forward(std::span<const FeatureSequence* const> seqs,
                         const TxnStreamConfig& cfg, TxnStreamParams& params,
                         Mode mode);

/// One sequence: [C].
Value txn_stream_forward(const FeatureSequence& seq, const TxnStreamConfig& cfg,
                         TxnStreamParams& params, Mode mode);

class TxnNet final : public Model {
 public:
  TxnNet(TxnConfig cfg, std::uint64_t seed);

  static KeyValues manifest_for(const TxnConfig& cfg);
  static TxnConfig config_from(const KeyValues& manifest);

  std::string kind() const override { return "txn"; }
  std::size_t num_classes() const override { return cfg_.num_classes; }

  Value forward(std::span<const VideoSample* const> batch, Mode mode) override;
  Value logits(const VideoSample& sample) const override;

  std::vector<NamedParam> parameters() const override;
  std::vector<NamedBuffer> buffers() override;
  KeyValues manifest() const override { return manifest_for(cfg_); }
  void check_compatible(const VideoSample& sample) const override;

  const TxnConfig& config() const { return cfg_; }
  TxnStreamParams& stream(std::size_t i) { return streams_[i]; }
  Value& classifier_weight() { return cls_w_; }
  Value& classifier_bias() { return cls_b_; }

 private:
  TxnConfig cfg_;
  std::vector<TxnStreamParams> streams_;
  Value cls_w_;  // [streams * C x K]
  Value cls_b_;  // [K]
};

}  // namespace vtm

#endif  // VTM_TXN_H_
