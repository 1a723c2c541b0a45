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

#ifndef VTM_MODEL_H_
#define VTM_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "vtm/dataset.h"
#include "vtm/kv_config.h"
#include "vtm/ops.h"
#include "vtm/rng.h"
#include "vtm/value.h"

namespace vtm {

struct NamedParam {
  std::string name;
  Value value;
};

/// Non-learnable state saved with a checkpoint (batch-norm statistics).
struct NamedBuffer {
  std::string name;
  std::vector<double>* data;
};

/// A classification head over multimodal frame features.
///
/// `forward` builds a training graph over a batch and may update internal
/// statistics in train mode. `logits` is an infer-mode, non-mutating forward
/// for one video; a model whose parameters are not being modified can serve
/// `logits` from several threads at once.
class Model {
 public:
  virtual ~Model() = default;

  virtual std::string kind() const = 0;
  virtual std::size_t num_classes() const = 0;

  /// [B x K] logits.
  virtual Value forward(std::span<const VideoSample* const> batch,
                        Mode mode) = 0;

  /// [K] logits in infer mode.
  virtual Value logits(const VideoSample& sample) const = 0;

  /// Learnable parameters in a fixed order.
  virtual std::vector<NamedParam> parameters() const = 0;
  virtual std::vector<NamedBuffer> buffers() { return {}; }

  /// Everything needed to rebuild the architecture (see make_model).
  virtual KeyValues manifest() const = 0;

  /// Throws ConfigError unless the sample carries every configured modality
  /// with the configured feature dimension.
  virtual void check_compatible(const VideoSample& sample) const = 0;
};

/// Rebuilds an architecture from a manifest; parameters are freshly
/// initialized from `seed`.
std::unique_ptr<Model> make_model(const KeyValues& manifest,
                                  std::uint64_t seed);

/// Stacks [K] rows into [B x K].
Value stack_rows(std::span<const Value> rows);

/// Shared check for check_compatible implementations.
void check_modalities(const VideoSample& sample,
                      std::span<const ModalitySpec> expected);

/// N(0, variance) initial values.
std::vector<double> normal_init(std::size_t n, double variance, Rng& rng);

}  // namespace vtm

#endif  // VTM_MODEL_H_
