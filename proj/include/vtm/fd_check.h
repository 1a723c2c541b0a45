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


// Central finite-difference gradient checking.

#ifndef VTM_FD_CHECK_H_
#define VTM_FD_CHECK_H_

#include <cstddef>
#include <functional>
#include <span>
#include <string>

#include "vtm/value.h"

namespace vtm {

struct FdReport {
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  std::size_t worst_param = 0;
  std::size_t worst_index = 0;
  std::size_t coordinates = 0;
  // min_kink_margin of the unperturbed graph.
  double kink_margin = 0.0;
  bool passed = true;
};

/// Relative error |a - n| / max(|a|, |n|, 1e-7).
double fd_relative_error(double analytic, double numeric);

/// Compares the gradient of `loss` with respect to every coordinate of
/// `params` against (f(p + h) - f(p - h)) / 2h. `loss` must rebuild its graph
/// from the current parameter data on each call and return a single-element
/// value. Parameter data is restored afterwards and their grads are left
/// zeroed. Throws ConfigError when step <= 0.
FdReport fd_check(const std::function<Value()>& loss, std::span<Value> params,
                  double step, double tol);

}  // namespace vtm

#endif  // VTM_FD_CHECK_H_
