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

#ifndef VTM_ERROR_H_
#define VTM_ERROR_H_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace vtm {

/// Base class for every error raised by the library. The subclass tells the
/// caller which family the failure belongs to; the CLI maps families to exit
/// codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Invalid hyper-parameter or configuration value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Data content is inconsistent (missing modality, bad label, id mismatch).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Non-finite input where a finite one is required.
class NumericDomainError : public Error {
 public:
  using Error::Error;
};

/// API misuse, e.g. calling backward on a non-scalar.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed binary or text file. Carries the byte offset where parsing
/// stopped.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::uint64_t offset)
      : Error(what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::uint64_t offset() const { return offset_; }

 private:
  std::uint64_t offset_;
};

}  // namespace vtm

#endif  // VTM_ERROR_H_
