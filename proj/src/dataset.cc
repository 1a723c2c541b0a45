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

#include "vtm/dataset.h"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "vtm/byte_io.h"
#include "vtm/error.h"
#include "vtm/rng.h"

namespace vtm {

static_assert(std::endian::native == std::endian::little,
              "MMF1 encoding assumes a little-endian host");

Value FeatureSequence::as_value() const {
  return Value::constant(Shape{frames, dim}, values);
}

const FeatureSequence& VideoSample::modality(const std::string& name) const {
  auto it = sequences.find(name);
  if (it == sequences.end()) {
    throw DataError("video '" + id + "' has no modality '" + name + "'");
  }
  return it->second;
}

std::vector<ModalitySpec> modalities_of(const VideoSample& sample) {
  std::vector<ModalitySpec> mods;
  for (const auto& [name, seq] : sample.sequences) mods.push_back({name, seq.dim});
  return mods;
}

void validate_samples(std::span<const VideoSample> samples) {
  std::set<std::string> ids;
  std::map<std::string, std::size_t> dims;
  for (const VideoSample& s : samples) {
    if (!ids.insert(s.id).second) {
      throw DataError("duplicate video id '" + s.id + "'");
    }
    if (s.sequences.empty()) {
      throw DataError("video '" + s.id + "' has no modalities");
    }
    for (const auto& [name, seq] : s.sequences) {
      if (name != seq.modality) {
        throw DataError("video '" + s.id + "': sequence keyed '" + name +
                        "' is tagged '" + seq.modality + "'");
      }
      if (seq.frames == 0 || seq.dim == 0) {
        throw DataError("video '" + s.id + "' modality '" + name +
                        "' is empty");
      }
      const auto [it, fresh] = dims.emplace(name, seq.dim);
      if (!fresh && it->second != seq.dim) {
        throw DataError("video '" + s.id + "' modality '" + name +
                        "' has dim " + std::to_string(seq.dim) +
                        " but earlier videos have " +
                        std::to_string(it->second));
      }
      if (seq.values.size() != seq.frames * seq.dim) {
        throw DataError("video '" + s.id + "' modality '" + name +
                        "' has wrong value count");
      }
      for (double v : seq.values) {
        if (!std::isfinite(v)) {
          throw DataError("video '" + s.id + "' modality '" + name +
                          "' has a non-finite value");
        }
      }
    }
  }
}

std::map<std::string, std::size_t> labels_of(
    std::span<const VideoSample> samples) {
  std::map<std::string, std::size_t> labels;
  for (const VideoSample& s : samples) labels[s.id] = s.label;
  return labels;
}

void write_labels(const std::string& path,
                  std::span<const VideoSample> samples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (const VideoSample& s : samples) out << s.id << ',' << s.label << '\n';
  if (!out) throw IoError("failed writing '" + path + "'");
}

std::map<std::string, std::size_t> read_labels(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::map<std::string, std::size_t> labels;
  std::string line;
  std::uint64_t offset = 0;
  while (std::getline(in, line)) {
    const std::uint64_t line_start = offset;
    offset += line.size() + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.rfind(',');
    std::size_t label = 0;
    if (comma == std::string::npos || comma == 0) {
      throw FormatError("label line must be 'video_id,label'", line_start);
    }
    const char* first = line.data() + comma + 1;
    const char* last = line.data() + line.size();
    auto [ptr, ec] = std::from_chars(first, last, label);
    if (ec != std::errc() || ptr != last) {
      throw FormatError("bad label value", line_start + comma + 1);
    }
    labels[line.substr(0, comma)] = label;
  }
  return labels;
}

namespace {

constexpr char kMagic[4] = {'M', 'M', 'F', '1'};
constexpr std::uint32_t kVersion = 1;

}  // namespace

std::string encode_mmf(std::span<const VideoSample> samples) {
  validate_samples(samples);
  std::string out(kMagic, 4);
  put_u32(out, kVersion);
  put_u32(out, checked_u32(samples.size(), "video count"));
  for (const VideoSample& s : samples) {
    put_u32(out, checked_u32(s.id.size(), "id length"));
    out += s.id;
    put_u32(out, checked_u32(s.label, "label"));
    put_u32(out, checked_u32(s.sequences.size(), "modality count"));
    for (const auto& [name, seq] : s.sequences) {
      put_u32(out, checked_u32(name.size(), "modality name length"));
      out += name;
      put_u32(out, checked_u32(seq.frames, "frame count"));
      put_u32(out, checked_u32(seq.dim, "feature dim"));
      for (double v : seq.values) {
        const float f = static_cast<float>(v);
        if (!std::isfinite(f)) {
          throw DataError("video '" + s.id +
                          "' has a value outside float32 range");
        }
        put_f32(out, f);
      }
    }
  }
  return out;
}

std::vector<VideoSample> decode_mmf(std::string_view bytes) {
  ByteReader r(bytes);
  r.need(4, "magic");
  if (bytes.substr(0, 4) != std::string_view(kMagic, 4)) {
    throw FormatError("bad magic, expected MMF1", 0);
  }
  r.str(4, "magic");
  const std::uint64_t version_at = r.offset();
  const std::uint32_t version = r.u32("version");
  if (version != kVersion) {
    throw FormatError("unsupported MMF version " + std::to_string(version),
                      version_at);
  }
  const std::uint32_t count = r.u32("video count");
  std::vector<VideoSample> samples;
  samples.reserve(std::min<std::uint32_t>(count, 1u << 16));
  for (std::uint32_t i = 0; i < count; ++i) {
    VideoSample s;
    s.id = r.str(r.u32("id length"), "id");
    s.label = r.u32("label");
    const std::uint32_t mods = r.u32("modality count");
    for (std::uint32_t m = 0; m < mods; ++m) {
      FeatureSequence seq;
      const std::uint64_t name_at = r.offset();
      seq.modality = r.str(r.u32("modality name length"), "modality name");
      seq.frames = r.u32("frame count");
      seq.dim = r.u32("feature dim");
      const std::uint64_t n =
          static_cast<std::uint64_t>(seq.frames) * seq.dim;
      if (n > r.remaining() / 4) {
        throw FormatError("truncated payload reading frame data", r.offset());
      }
      seq.values.resize(n);
      for (std::uint64_t k = 0; k < n; ++k) {
        const std::uint64_t at = r.offset();
        const float f = r.f32("frame data");
        if (!std::isfinite(f)) throw FormatError("non-finite feature value", at);
        seq.values[k] = f;
      }
      if (!s.sequences.emplace(seq.modality, std::move(seq)).second) {
        throw FormatError("duplicate modality in video '" + s.id + "'",
                          name_at);
      }
    }
    samples.push_back(std::move(s));
  }
  if (!r.done()) throw FormatError("trailing bytes after last video", r.offset());
  return samples;
}

void write_mmf(const std::string& path, std::span<const VideoSample> samples) {
  const std::string bytes = encode_mmf(samples);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing '" + path + "'");
}

std::vector<VideoSample> read_mmf(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return decode_mmf(buf.str());
}

BatchIter::BatchIter(std::span<const VideoSample> samples,
                     std::size_t batch_size, std::uint64_t seed)
    : samples_(samples), batch_size_(batch_size), order_(samples.size()) {
  if (batch_size_ == 0) throw ConfigError("batch size must be >= 1");
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(order_);
}

bool BatchIter::next(std::vector<const VideoSample*>& batch) {
  batch.clear();
  if (pos_ >= order_.size()) return false;
  const std::size_t end = std::min(order_.size(), pos_ + batch_size_);
  for (; pos_ < end; ++pos_) batch.push_back(&samples_[order_[pos_]]);
  return true;
}

std::size_t BatchIter::num_batches() const {
  return (order_.size() + batch_size_ - 1) / batch_size_;
}

}  // namespace vtm
