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

#include "vtm/synth.h"

#include <cmath>
#include <cstdio>
#include <set>

#include "vtm/error.h"
#include "vtm/rng.h"

namespace vtm {

void SynthConfig::validate() const {
  if (num_classes == 0) throw ConfigError("classes must be >= 1");
  if (videos_per_class == 0) throw ConfigError("videos per class must be >= 1");
  if (frames == 0) throw ConfigError("frames must be >= 1");
  if (signal_frames < 1 || signal_frames > frames) {
    throw ConfigError("signal frames must be in [1, frames], got " +
                      std::to_string(signal_frames));
  }
  if (!(signal_std > 0.0) || !(noise_std > 0.0)) {
    throw ConfigError("signal and noise std must be positive");
  }
  if (modalities.empty()) throw ConfigError("at least one modality required");
  std::set<std::string> names;
  for (const ModalitySpec& m : modalities) {
    if (m.name.empty()) throw ConfigError("modality name must be non-empty");
    if (m.dim == 0) throw ConfigError("modality '" + m.name + "' has dim 0");
    if (!names.insert(m.name).second) {
      throw ConfigError("duplicate modality '" + m.name + "'");
    }
  }
}

std::string format_modalities(const std::vector<ModalitySpec>& modalities) {
  std::string out;
  for (const ModalitySpec& m : modalities) {
    if (!out.empty()) out += ',';
    out += m.name + ':' + std::to_string(m.dim);
  }
  return out;
}

std::vector<ModalitySpec> parse_modalities(const std::string& text) {
  std::vector<ModalitySpec> out;
  for (const std::string& item : split(text, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw ConfigError("dims: expected name:dim, got '" + item + "'");
    }
    out.push_back({item.substr(0, colon), parse_size(item.substr(colon + 1),
                                                     "dims")});
  }
  return out;
}

void SynthConfig::set(const std::string& key, const std::string& value) {
  if (key == "classes") {
    num_classes = parse_size(value, key);
  } else if (key == "videos_per_class") {
    videos_per_class = parse_size(value, key);
  } else if (key == "dims") {
    modalities = parse_modalities(value);
  } else if (key == "frames") {
    frames = parse_size(value, key);
  } else if (key == "signal_frames") {
    signal_frames = parse_size(value, key);
  } else if (key == "signal_std") {
    signal_std = parse_double(value, key);
  } else if (key == "noise_std") {
    noise_std = parse_double(value, key);
  } else if (key == "seed") {
    seed = parse_u64(value, key);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

KeyValues SynthConfig::to_key_values() const {
  return {{"classes", std::to_string(num_classes)},
          {"videos_per_class", std::to_string(videos_per_class)},
          {"dims", format_modalities(modalities)},
          {"frames", std::to_string(frames)},
          {"signal_frames", std::to_string(signal_frames)},
          {"signal_std", format_double(signal_std)},
          {"noise_std", format_double(noise_std)},
          {"seed", std::to_string(seed)}};
}

std::vector<std::string> SynthConfig::keys() {
  std::vector<std::string> out;
  for (const auto& [k, v] : SynthConfig{}.to_key_values()) out.push_back(k);
  return out;
}

SynthDataset synth_generate(const SynthConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  SynthDataset ds;

  for (const ModalitySpec& m : cfg.modalities) {
    auto& protos = ds.prototypes[m.name];
    protos.resize(cfg.num_classes);
    for (auto& p : protos) {
      p.resize(m.dim);
      double norm = 0.0;
      do {
        norm = 0.0;
        for (double& v : p) {
          v = rng.normal();
          norm += v * v;
        }
        norm = std::sqrt(norm);
      } while (norm == 0.0);
      for (double& v : p) v /= norm;
    }
  }

  const std::size_t total = cfg.num_classes * cfg.videos_per_class;
  const std::size_t num_train = total * 4 / 5;
  std::size_t index = 0;
  for (std::size_t v = 0; v < cfg.videos_per_class; ++v) {
    for (std::size_t c = 0; c < cfg.num_classes; ++c, ++index) {
      VideoSample s;
      char id[32];
      std::snprintf(id, sizeof id, "vid%06zu", index);
      s.id = id;
      s.label = c;
      for (const ModalitySpec& m : cfg.modalities) {
        FeatureSequence seq{m.name, cfg.frames, m.dim, {}};
        seq.values.resize(cfg.frames * m.dim);
        std::vector<bool> is_signal(cfg.frames, false);
        for (std::size_t t :
             rng.sample_without_replacement(cfg.frames, cfg.signal_frames)) {
          is_signal[t] = true;
        }
        const std::vector<double>& proto = ds.prototypes[m.name][c];
        for (std::size_t t = 0; t < cfg.frames; ++t) {
          double* f = seq.values.data() + t * m.dim;
          for (std::size_t d = 0; d < m.dim; ++d) {
            f[d] = is_signal[t] ? proto[d] + cfg.signal_std * rng.normal()
                                : cfg.noise_std * rng.normal();
          }
        }
        s.sequences.emplace(m.name, std::move(seq));
      }
      (index < num_train ? ds.train : ds.val).push_back(std::move(s));
    }
  }
  return ds;
}

}  // namespace vtm
