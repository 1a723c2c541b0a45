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


// Named gradient checks for every differentiable operator and for both full
// heads, each run over several derived seeds.

#ifndef VTM_GRADCHECK_H_
#define VTM_GRADCHECK_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace vtm {

struct GradcheckOptions {
  std::uint64_t seed = 0;
  std::size_t num_seeds = 5;
  double step = 1e-3;
  double tol = 1e-4;
  // Draws whose graph passes closer than this to a ReLU or max kink are
  // redrawn.
  double min_kink_margin = 1e-2;
  std::size_t max_redraws = 1000;
};

struct GradcheckResult {
  std::string name;
  double max_rel_error = 0.0;
  std::size_t coordinates = 0;
  std::size_t redraws = 0;
  bool passed = false;
};

/// Check names in registry order.
std::vector<std::string> gradcheck_names();

/// Runs one named check, or every check for "all". Throws ConfigError on an
/// unknown name (the message lists the valid names).
std::vector<GradcheckResult> run_gradcheck(const std::string& name,
                                           const GradcheckOptions& options);

}  // namespace vtm

#endif  // VTM_GRADCHECK_H_
