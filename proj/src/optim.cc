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


#include "vtm/optim.h"

#include <cmath>

#include "vtm/error.h"

namespace vtm {

void sgd_momentum_step(std::span<double> param, std::span<const double> grad,
                       std::span<double> velocity, const SgdMomentumHyper& h) {
  if (grad.size() != param.size() || velocity.size() != param.size()) {
    throw ShapeError("sgd_momentum_step: param/grad/velocity sizes differ");
  }
  for (std::size_t i = 0; i < param.size(); ++i) {
    velocity[i] = h.momentum * velocity[i] + grad[i];
    param[i] -= h.lr * velocity[i];
  }
}

void adam_step(std::span<double> param, std::span<const double> grad,
               AdamState& state, const AdamHyper& h) {
  if (state.m.empty() && state.v.empty()) {
    state.m.assign(param.size(), 0.0);
    state.v.assign(param.size(), 0.0);
  }
  if (grad.size() != param.size() || state.m.size() != param.size() ||
      state.v.size() != param.size()) {
    throw ShapeError("adam_step: param/grad/state sizes differ");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(h.beta1, t);
  const double c2 = 1.0 - std::pow(h.beta2, t);
  for (std::size_t i = 0; i < param.size(); ++i) {
    state.m[i] = h.beta1 * state.m[i] + (1.0 - h.beta1) * grad[i];
    state.v[i] = h.beta2 * state.v[i] + (1.0 - h.beta2) * grad[i] * grad[i];
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    param[i] -= h.lr * m_hat / (std::sqrt(v_hat) + h.eps);
  }
}

SgdMomentum::SgdMomentum(std::vector<Value> params, SgdMomentumHyper hyper)
    : params_(std::move(params)), hyper_(hyper) {
  for (const Value& p : params_) velocity_.emplace_back(p.numel(), 0.0);
}

void SgdMomentum::step() {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    sgd_momentum_step(params_[i].mutable_data(), params_[i].grad(),
                      velocity_[i], hyper_);
  }
}

Adam::Adam(std::vector<Value> params, AdamHyper hyper)
    : params_(std::move(params)), state_(params_.size()), hyper_(hyper) {}

void Adam::step() {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    adam_step(params_[i].mutable_data(), params_[i].grad(), state_[i], hyper_);
  }
}

}  // namespace vtm
