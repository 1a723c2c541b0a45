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


#include "vtm/checkpoint.h"

#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "vtm/byte_io.h"
#include "vtm/error.h"

namespace vtm {

namespace {

constexpr char kMagic[4] = {'V', 'T', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kMaxRank = 3;

struct Slot {
  std::vector<std::size_t> dims;
  std::span<double> data;
  bool seen = false;
};

void put_record(std::string& out, const std::string& name,
                const std::vector<std::size_t>& dims,
                std::span<const double> data) {
  put_u32(out, checked_u32(name.size(), "record name length"));
  out += name;
  put_u32(out, checked_u32(dims.size(), "rank"));
  for (std::size_t d : dims) put_u32(out, checked_u32(d, "extent"));
  for (double v : data) put_f64(out, v);
}

}  // namespace

std::string encode_checkpoint(Model& model) {
  std::string out(kMagic, 4);
  put_u32(out, kVersion);
  const std::string manifest = format_key_values(model.manifest());
  put_u32(out, checked_u32(manifest.size(), "manifest length"));
  out += manifest;
  const auto params = model.parameters();
  const auto buffers = model.buffers();
  put_u32(out, checked_u32(params.size() + buffers.size(), "record count"));
  for (const NamedParam& p : params) {
    put_record(out, p.name, p.value.shape().dims(), p.value.data());
  }
  for (const NamedBuffer& b : buffers) {
    put_record(out, b.name, {b.data->size()}, *b.data);
  }
  return out;
}

std::unique_ptr<Model> decode_checkpoint(std::string_view bytes) {
  ByteReader r(bytes);
  if (r.str(4, "magic") != std::string_view(kMagic, 4)) {
    throw FormatError("not a checkpoint file (bad magic)", 0);
  }
  const std::uint64_t version_at = r.offset();
  if (r.u32("version") != kVersion) {
    throw FormatError("unsupported checkpoint version", version_at);
  }
  const std::uint64_t manifest_at = r.offset();
  const std::uint32_t manifest_len = r.u32("manifest length");
  const std::string manifest_text = r.str(manifest_len, "manifest");

  std::unique_ptr<Model> model;
  try {
    model = make_model(parse_key_values(manifest_text, "checkpoint manifest"),
                       0);
  } catch (const ConfigError& e) {
    throw FormatError(std::string("invalid checkpoint manifest: ") + e.what(),
                      manifest_at);
  }

  std::map<std::string, Slot> slots;
  for (NamedParam& p : model->parameters()) {
    slots[p.name] = Slot{p.value.shape().dims(), p.value.mutable_data()};
  }
  for (NamedBuffer& b : model->buffers()) {
    slots[b.name] = Slot{{b.data->size()}, *b.data};
  }

  const std::uint32_t count = r.u32("record count");
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint64_t at = r.offset();
    const std::string name = r.str(r.u32("record name length"), "record name");
    auto it = slots.find(name);
    if (it == slots.end()) {
      throw FormatError("unknown checkpoint record '" + name + "'", at);
    }
    Slot& slot = it->second;
    if (slot.seen) {
      throw FormatError("duplicate checkpoint record '" + name + "'", at);
    }
    const std::uint32_t rank = r.u32("rank");
    if (rank == 0 || rank > kMaxRank) {
      throw FormatError("record '" + name + "' has invalid rank", at);
    }
    std::vector<std::size_t> dims(rank);
    for (auto& d : dims) d = r.u32("extent");
    if (dims != slot.dims) {
      throw FormatError("record '" + name +
                            "' shape disagrees with the manifest",
                        at);
    }
    r.need(8 * static_cast<std::uint64_t>(slot.data.size()), "record data");
    for (double& v : slot.data) v = r.f64("record data");
    slot.seen = true;
  }
  for (const auto& [name, slot] : slots) {
    if (!slot.seen) {
      throw FormatError("checkpoint lacks record '" + name + "'", r.offset());
    }
  }
  if (!r.done()) {
    throw FormatError("trailing bytes after checkpoint records", r.offset());
  }
  return model;
}

void save_checkpoint(const std::string& path, Model& model) {
  const std::string bytes = encode_checkpoint(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::unique_ptr<Model> load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return decode_checkpoint(ss.str());
}

}  // namespace vtm
