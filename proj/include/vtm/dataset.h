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

#ifndef VTM_DATASET_H_
#define VTM_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "vtm/value.h"

namespace vtm {

/// One modality's frame features for one video: `frames` x `dim`, row-major.
struct FeatureSequence {
  std::string modality;
  std::size_t frames = 0;
  std::size_t dim = 0;
  std::vector<double> values;

  std::span<const double> frame(std::size_t t) const {
    return std::span<const double>(values).subspan(t * dim, dim);
  }

  /// Constant [T x D] graph leaf.
  Value as_value() const;
};

/// Modality name and feature dimension.
struct ModalitySpec {
  std::string name;
  std::size_t dim = 16;

  friend bool operator==(const ModalitySpec&, const ModalitySpec&) = default;
};

struct VideoSample {
  std::string id;
  std::size_t label = 0;
  std::map<std::string, FeatureSequence> sequences;

  /// Throws DataError when the modality is absent.
  const FeatureSequence& modality(const std::string& name) const;
};

/// Modalities of a sample in name order.
std::vector<ModalitySpec> modalities_of(const VideoSample& sample);

/// Throws DataError on an empty sequence, a shape/length mismatch, a
/// non-finite value, a sample without modalities, a duplicate id or a
/// modality whose dim differs between samples.
void validate_samples(std::span<const VideoSample> samples);

/// Label file: one `video_id,label` line per sample.
void write_labels(const std::string& path, std::span<const VideoSample> samples);
std::map<std::string, std::size_t> read_labels(const std::string& path);

std::map<std::string, std::size_t> labels_of(
    std::span<const VideoSample> samples);

// MMF1 container, little-endian:
//   "MMF1" | u32 version=1 | u32 num_videos
//   per video:    u32 id_len | id | u32 label | u32 num_modalities
//   per modality: u32 name_len | name | u32 T | u32 D | T*D float32
// Modalities are written in name order. Values are stored as 32-bit floats
// and widened to 64 bits on load.

std::string encode_mmf(std::span<const VideoSample> samples);
/// Throws FormatError (with byte offset) on bad magic, unsupported version,
/// truncation, trailing bytes or non-finite values.
std::vector<VideoSample> decode_mmf(std::string_view bytes);

void write_mmf(const std::string& path, std::span<const VideoSample> samples);
std::vector<VideoSample> read_mmf(const std::string& path);

/// Deterministic shuffled batches over a sample list; the final batch may be
/// short.
class BatchIter {
 public:
  BatchIter(std::span<const VideoSample> samples, std::size_t batch_size,
            std::uint64_t seed);

  /// Fills `batch` with the next batch. Returns false when the epoch is done.
  bool next(std::vector<const VideoSample*>& batch);

  std::size_t num_batches() const;

 private:
  std::span<const VideoSample> samples_;
  std::size_t batch_size_;
  std::vector<std::size_t> order_;
  std::size_t pos_ = 0;
};

}  // namespace vtm

#endif  // VTM_DATASET_H_
