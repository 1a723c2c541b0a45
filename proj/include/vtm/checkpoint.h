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


// Model checkpoints.
//
// Layout (little-endian): magic "VTCK", u32 version = 1, u32 manifest_len,
// manifest text (`key = value` lines), u32 num_records, then per record
// u32 name_len, name bytes, u32 rank, rank x u32 dims, numel x f64 values.
// Records cover every learnable parameter followed by every buffer.

#ifndef VTM_CHECKPOINT_H_
#define VTM_CHECKPOINT_H_

#include <memory>
#include <string>
#include <string_view>

#include "vtm/model.h"

namespace vtm {

std::string encode_checkpoint(Model& model);

/// Rebuilds the architecture from the manifest and restores every record.
/// Throws FormatError on malformed bytes, unknown, missing or duplicate
/// records, or a shape that disagrees with the manifest.
std::unique_ptr<Model> decode_checkpoint(std::string_view bytes);

void save_checkpoint(const std::string& path, Model& model);
std::unique_ptr<Model> load_checkpoint(const std::string& path);

}  // namespace vtm

#endif  // VTM_CHECKPOINT_H_
