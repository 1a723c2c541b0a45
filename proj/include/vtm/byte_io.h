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


// Little-endian byte encoding helpers shared by the binary file formats.

#ifndef VTM_BYTE_IO_H_
#define VTM_BYTE_IO_H_

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>

#include "vtm/error.h"

namespace vtm {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

inline void put_u32(std::string& out, std::uint32_t v) {
  char b[4];
  std::memcpy(b, &v, 4);
  out.append(b, 4);
}

inline void put_f32(std::string& out, float v) {
  char b[4];
  std::memcpy(b, &v, 4);
  out.append(b, 4);
}

inline void put_f64(std::string& out, double v) {
  char b[8];
  std::memcpy(b, &v, 8);
  out.append(b, 8);
}

/// Throws DataError when `v` does not fit in a u32 field.
inline std::uint32_t checked_u32(std::uint64_t v, const char* what) {
  if (v > UINT32_MAX) {
    throw DataError(std::string(what) + " does not fit in 32 bits");
  }
  return static_cast<std::uint32_t>(v);
}

/// Sequential reader that raises FormatError with the current offset when
/// the input runs out.
class ByteReader {
 public:
  explicit ByteReader(std::string_view bytes) : bytes_(bytes) {}

  std::uint64_t offset() const { return pos_; }
  bool done() const { return pos_ == bytes_.size(); }
  std::uint64_t remaining() const { return bytes_.size() - pos_; }

  std::uint32_t u32(const char* what) { return read<std::uint32_t>(what); }
  float f32(const char* what) { return read<float>(what); }
  double f64(const char* what) { return read<double>(what); }

  std::string str(std::size_t len, const char* what) {
    need(len, what);
    std::string s(bytes_.substr(pos_, len));
    pos_ += len;
    return s;
  }

  void need(std::uint64_t n, const char* what) const {
    if (remaining() < n) {
      throw FormatError(std::string("truncated payload reading ") + what, pos_);
    }
  }

 private:
  template <typename T>
  T read(const char* what) {
    need(sizeof(T), what);
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace vtm

#endif  // VTM_BYTE_IO_H_
