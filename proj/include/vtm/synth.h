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

// Planted-signal synthetic benchmark.
//
// Every (class, modality) pair owns a unit-norm prototype. A video of class c
// holds, per modality, `signal_frames` frames equal to the prototype plus
// N(0, signal_std^2) noise at uniformly drawn positions; every other frame is
// N(0, noise_std^2) per coordinate. Only a handful of frames carry the class,
// so pooling that can single out frames has an advantage over the temporal
// mean.

#ifndef VTM_SYNTH_H_
#define VTM_SYNTH_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vtm/dataset.h"
#include "vtm/kv_config.h"

namespace vtm {

struct SynthConfig {
  std::size_t num_classes = 10;
  std::size_t videos_per_class = 100;
  std::vector<ModalitySpec> modalities = {{"rgb", 16}, {"flow", 16}};
  std::size_t frames = 30;
  std::size_t signal_frames = 3;
  double signal_std = 0.1;
  double noise_std = 1.0;
  std::uint64_t seed = 42;

  /// Throws ConfigError on an invalid configuration.
  void validate() const;

  /// Text keys: classes, videos_per_class, dims (`name:dim,...`), frames,
  /// signal_frames, signal_std, noise_std, seed. Throws ConfigError naming
  /// an unknown key or a value that does not parse.
  void set(const std::string& key, const std::string& value);
  KeyValues to_key_values() const;
  static std::vector<std::string> keys();
};

std::string format_modalities(const std::vector<ModalitySpec>& modalities);
std::vector<ModalitySpec> parse_modalities(const std::string& text);

struct SynthDataset {
  std::vector<VideoSample> train;
  std::vector<VideoSample> val;
  /// prototypes[modality][class] is a unit vector of that modality's dim.
  std::map<std::string, std::vector<std::vector<double>>> prototypes;
};

/// Pure function of the config. Videos are built round-robin over classes
/// (video 0 of every class, then video 1, ...); the first 80% in that order
/// form the training split, so both splits are class-balanced.
SynthDataset synth_generate(const SynthConfig& cfg);

}  // namespace vtm

#endif  // VTM_SYNTH_H_
