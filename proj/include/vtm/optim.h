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


#ifndef VTM_OPTIM_H_
#define VTM_OPTIM_H_

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "vtm/value.h"

namespace vtm {

struct SgdMomentumHyper {
  double lr = 0.01;
  double momentum = 0.9;
};

struct AdamHyper {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::size_t step = 0;
};

/// v <- momentum * v + g; p <- p - lr * v. Throws ShapeError when the three
/// spans differ in length.
void sgd_momentum_step(std::span<double> param, std::span<const double> grad,
                       std::span<double> velocity, const SgdMomentumHyper& h);

/// Bias-corrected Adam update. `state.step` counts completed updates and is
/// incremented here.
void adam_step(std::span<double> param, std::span<const double> grad,
               AdamState& state, const AdamHyper& h);

class Optimizer {
 public:
  virtual ~Optimizer() = default;
  /// Applies one update to every parameter from its accumulated gradient.
  virtual void step() = 0;
};

class SgdMomentum final : public Optimizer {
 public:
  SgdMomentum(std::vector<Value> params, SgdMomentumHyper hyper);
  void step() override;

 private:
  std::vector<Value> params_;
  std::vector<std::vector<double>> velocity_;
  SgdMomentumHyper hyper_;
};

class Adam final : public Optimizer {
 public:
  Adam(std::vector<Value> params, AdamHyper hyper);
  void step() override;

 private:
  std::vector<Value> params_;
  std::vector<AdamState> state_;
  AdamHyper hyper_;
};

}  // namespace vtm

#endif  // VTM_OPTIM_H_
