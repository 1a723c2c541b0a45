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


#include "vtm/score_table.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "vtm/error.h"
#include "vtm/kv_config.h"

namespace vtm {

namespace {

void check_compatible_tables(std::span<const ScoreTable> tables) {
  if (tables.empty()) throw ConfigError("fusion: no input tables");
  const ScoreTable& first = tables[0];
  for (std::size_t i = 1; i < tables.size(); ++i) {
    const ScoreTable& t = tables[i];
    if (t.num_classes != first.num_classes) {
      throw DataError("fusion: table " + std::to_string(i) + " has " +
                      std::to_string(t.num_classes) + " classes, table 0 has " +
                      std::to_string(first.num_classes));
    }
    if (t.rows.size() != first.rows.size() ||
        !std::equal(t.rows.begin(), t.rows.end(), first.rows.begin(),
                    [](const auto& a, const auto& b) {
                      return a.first == b.first;
                    })) {
      throw DataError("fusion: table " + std::to_string(i) +
                      " covers a different set of video ids than table 0");
    }
  }
}

}  // namespace

void ScoreTable::validate() const {
  if (num_classes == 0) throw DataError("score table: zero classes");
  for (const auto& [id, p] : rows) {
    if (p.size() != num_classes) {
      throw DataError("score table: row '" + id + "' has " +
                      std::to_string(p.size()) + " entries, expected " +
                      std::to_string(num_classes));
    }
    double total = 0.0;
    for (double v : p) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw DataError("score table: row '" + id +
                        "' has an entry outside [0, 1]");
      }
      total += v;
    }
    if (std::abs(total - 1.0) > kRowSumTolerance) {
      throw DataError("score table: row '" + id + "' sums to " +
                      format_double(total));
    }
  }
}

std::string format_score_table(const ScoreTable& table) {
  std::string out = "#classes=" + std::to_string(table.num_classes) + "\n";
  char buf[32];
  for (const auto& [id, p] : table.rows) {
    out += id;
    for (double v : p) {
      std::snprintf(buf, sizeof(buf), ",%.9g", v);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

ScoreTable parse_score_table(std::string_view text) {
  ScoreTable table;
  std::size_t line_no = 0;
  bool have_header = false;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{}
                                        : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const std::string where = "scores line " + std::to_string(line_no);
    if (!have_header) {
      constexpr std::string_view kPrefix = "#classes=";
      if (line.substr(0, kPrefix.size()) != kPrefix) {
        throw DataError(where + ": expected '#classes=K' header");
      }
      table.num_classes = parse_size(line.substr(kPrefix.size()), "classes");
      have_header = true;
      continue;
    }
    auto fields = split(line, ',');
    if (fields.size() != table.num_classes + 1) {
      throw DataError(where + ": expected " +
                      std::to_string(table.num_classes + 1) + " fields, got " +
                      std::to_string(fields.size()));
    }
    std::vector<double> p;
    p.reserve(table.num_classes);
    for (std::size_t k = 1; k < fields.size(); ++k) {
      try {
        p.push_back(parse_double(fields[k], where));
      } catch (const ConfigError& e) {
        throw DataError(e.what());
      }
    }
    if (!table.rows.emplace(fields[0], std::move(p)).second) {
      throw DataError(where + ": duplicate video id '" + fields[0] + "'");
    }
  }
  if (!have_header) throw DataError("scores: missing '#classes=K' header");
  table.validate();
  return table;
}

void write_score_table(const std::string& path, const ScoreTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << format_score_table(table);
  if (!out) throw IoError("write to '" + path + "' failed");
}

ScoreTable read_score_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_score_table(ss.str());
}

ScoreTable late_fuse(std::span<const ScoreTable> tables,
                     std::span<const double> weights) {
  check_compatible_tables(tables);
  if (weights.size() != tables.size()) {
    throw ConfigError("fusion: " + std::to_string(weights.size()) +
                      " weights for " + std::to_string(tables.size()) +
                      " tables");
  }
  double wsum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ConfigError("fusion: weights must be finite and non-negative");
    }
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > kWeightSumTolerance) {
    throw ConfigError("fusion: weights sum to " + format_double(wsum) +
                      ", expected 1");
  }
  // Anchored at the first table so that fusing identical tables is exact:
  // p1 + sum_i w_i (p_i - p1) equals sum_i w_i p_i when the weights sum to 1.
  ScoreTable out{tables[0].num_classes, {}};
  for (const auto& [id, base] : tables[0].rows) {
    std::vector<double> p = base;
    for (std::size_t i = 1; i < tables.size(); ++i) {
      const std::vector<double>& q = tables[i].rows.at(id);
      for (std::size_t k = 0; k < p.size(); ++k) {
        p[k] += weights[i] * (q[k] - base[k]);
      }
    }
    out.rows.emplace(id, std::move(p));
  }
  return out;
}

ScoreTable ensemble(std::span<const ScoreTable> tables) {
  check_compatible_tables(tables);
  std::vector<double> w(tables.size(), 1.0 / static_cast<double>(tables.size()));
  return late_fuse(tables, w);
}

std::vector<std::size_t> top_k_indices(std::span<const double> scores,
                                       std::size_t k) {
  std::vector<std::size_t> idx(scores.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  k = std::min(k, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k),
                    idx.end(), [&](std::size_t a, std::size_t b) {
                      if (scores[a] != scores[b]) return scores[a] > scores[b];
                      return a < b;
                    });
  idx.resize(k);
  return idx;
}

double top_k_accuracy(const ScoreTable& table,
                      const std::map<std::string, std::size_t>& labels,
                      std::size_t k) {
  if (k == 0 || k > table.num_classes) {
    throw ConfigError("top-k: k must be in [1, " +
                      std::to_string(table.num_classes) + "], got " +
                      std::to_string(k));
  }
  if (table.rows.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& [id, p] : table.rows) {
    auto it = labels.find(id);
    if (it == labels.end()) {
      throw DataError("top-k: no label for video '" + id + "'");
    }
    const auto best = top_k_indices(p, k);
    if (std::find(best.begin(), best.end(), it->second) != best.end()) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(table.rows.size());
}

}  // namespace vtm
