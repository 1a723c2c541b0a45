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


#include "vtm/fd_check.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "vtm/error.h"

namespace vtm {

double fd_relative_error(double analytic, double numeric) {
  const double denom =
      std::max({std::abs(analytic), std::abs(numeric), 1e-7});
  return std::abs(analytic - numeric) / denom;
}

FdReport fd_check(const std::function<Value()>& loss, std::span<Value> params,
                  double step, double tol) {
  if (!(step > 0.0)) throw ConfigError("fd_check: step must be positive");
  FdReport report;
  zero_grads(params);
  Value root = loss();
  report.kink_margin = min_kink_margin(root);
  backward(root);

  std::vector<std::vector<double>> analytic;
  analytic.reserve(params.size());
  for (const Value& p : params) {
    analytic.emplace_back(p.grad().begin(), p.grad().end());
  }
  zero_grads(params);

  for (std::size_t i = 0; i < params.size(); ++i) {
    std::span<double> data = params[i].mutable_data();
    for (std::size_t j = 0; j < data.size(); ++j) {
      const double saved = data[j];
      data[j] = saved + step;
      const double up = loss().item();
      data[j] = saved - step;
      const double down = loss().item();
      data[j] = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double rel = fd_relative_error(analytic[i][j], numeric);
      ++report.coordinates;
      report.max_abs_error =
          std::max(report.max_abs_error, std::abs(analytic[i][j] - numeric));
      if (rel > report.max_rel_error || std::isnan(rel)) {
        report.max_rel_error = std::isnan(rel) ? INFINITY : rel;
        report.worst_param = i;
        report.worst_index = j;
      }
    }
  }
  report.passed = report.max_rel_error <= tol;
  return report;
}

}  // namespace vtm
