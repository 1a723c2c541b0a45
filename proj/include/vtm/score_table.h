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


// Per-video class-probability tables, their text format, and the score
// combination and accuracy operations built on them.
//
// File format: a `#classes=K` header line, then one `video_id,p_0,...,p_{K-1}`
// line per video with probabilities printed to 9 significant digits.

#ifndef VTM_SCORE_TABLE_H_
#define VTM_SCORE_TABLE_H_

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vtm {

constexpr double kRowSumTolerance = 1e-6;
constexpr double kWeightSumTolerance = 1e-9;

struct ScoreTable {
  std::size_t num_classes = 0;
  std::map<std::string, std::vector<double>> rows;

  /// Throws DataError on a wrong row width, an entry outside [0, 1] or a row
  /// sum off by more than kRowSumTolerance.
  void validate() const;

  friend bool operator==(const ScoreTable&, const ScoreTable&) = default;
};

std::string format_score_table(const ScoreTable& table);
ScoreTable parse_score_table(std::string_view text);
void write_score_table(const std::string& path, const ScoreTable& table);
ScoreTable read_score_table(const std::string& path);

/// Per-video weighted arithmetic mean. Weights must be non-negative and sum
/// to 1 within kWeightSumTolerance (ConfigError); tables must share ids and
/// K (DataError).
ScoreTable late_fuse(std::span<const ScoreTable> tables,
                     std::span<const double> weights);

/// Unweighted mean of the tables.
ScoreTable ensemble(std::span<const ScoreTable> tables);

/// Indices of the k largest entries, ties broken by lower index.
std::vector<std::size_t> top_k_indices(std::span<const double> scores,
                                       std::size_t k);

/// Fraction of videos whose label is among the k best classes.
double top_k_accuracy(const ScoreTable& table,
                      const std::map<std::string, std::size_t>& labels,
                      std::size_t k);

}  // namespace vtm

#endif  // VTM_SCORE_TABLE_H_
