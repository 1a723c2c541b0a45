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

// Flat `key = value` text: one pair per line, `#` starts a comment, blank
// lines ignored. Used for CLI config files and checkpoint manifests.

#ifndef VTM_KV_CONFIG_H_
#define VTM_KV_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace vtm {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Throws ConfigError naming `source` and the line on malformed input or a
/// repeated key.
KeyValues parse_key_values(std::string_view text, std::string_view source);
KeyValues read_key_values_file(const std::string& path);
std::string format_key_values(const KeyValues& kv);

/// Value of `key`, or ConfigError if absent.
const std::string& require_key(const KeyValues& kv, const std::string& key);

// Strict scalar parsers; throw ConfigError mentioning `key`.
double parse_double(std::string_view text, std::string_view key);
std::uint64_t parse_u64(std::string_view text, std::string_view key);
std::size_t parse_size(std::string_view text, std::string_view key);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

std::vector<std::string> split(std::string_view text, char sep);

}  // namespace vtm

#endif  // VTM_KV_CONFIG_H_
