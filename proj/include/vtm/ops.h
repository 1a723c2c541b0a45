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

// Differentiable operators.
//
// Sequence operators accept either [T x C] or [B x T x C]; a rank-2 input is
// treated as a batch of one. Time is always the second-to-last axis.

#ifndef VTM_OPS_H_
#define VTM_OPS_H_

#include <cstddef>
#include <span>
#include <vector>

#include "vtm/value.h"

namespace vtm {

enum class Mode { kTrain, kInfer };

inline constexpr double kNormEpsilon = 1e-12;
inline constexpr double kBatchNormEpsilon = 1e-5;
inline constexpr double kBatchNormMomentum = 0.9;

/// softmax(alpha * logits) over a rank-1 value, with max subtraction.
/// The normalizer is summed in sorted order, so permuting the logits permutes
/// the output exactly. Throws NumericDomainError on non-finite logits and
/// ConfigError when alpha <= 0.
Value softmax_sharp(const Value& logits, double alpha);

/// v / max(||v||_2, 1e-12) over a rank-1 value. In the clamped regime the
/// denominator is treated as a constant by the backward pass.
Value l2_normalize(const Value& v);

/// [m x k] * [k x n]. Each inner product is accumulated in a canonical
/// (sorted) order so results do not depend on the ordering of the contracted
/// index.
Value matmul(const Value& a, const Value& b);

/// Per-channel cross-correlation with odd kernel length k and same-length
/// zero padding: y[t,c] = sum_j kernels[j,c] * x[t+j-(k-1)/2, c].
Value depthwise_conv1d(const Value& x, const Value& kernels);

/// Per-timestep affine map over channels: y[t,:] = x[t,:] * weight + bias.
Value pointwise_conv1d(const Value& x, const Value& weight, const Value& bias);

/// Running statistics of one batch-norm layer.
struct BatchNormState {
  std::vector<double> running_mean;
  std::vector<double> running_var;

  /// mean 0, variance 1.
  static BatchNormState identity(std::size_t channels);
};

/// Normalizes each channel over batch x time with the batch statistics and
/// updates `state` (momentum 0.9, unbiased variance). Requires B*T >= 2.
Value batch_norm_train(const Value& x, const Value& gamma, const Value& beta,
                       BatchNormState& state);

/// Normalizes with the running statistics; never mutates state.
Value batch_norm_infer(const Value& x, const Value& gamma, const Value& beta,
                       const BatchNormState& state);

Value batch_norm(const Value& x, const Value& gamma, const Value& beta,
                 BatchNormState& state, Mode mode);

/// Max over n contiguous segments; segment i covers [floor(iT/n),
/// floor((i+1)T/n)). Gradient goes to the first argmax.
Value adaptive_max_pool1d(const Value& x, std::size_t segments);

Value relu(const Value& x);

/// Joins values along `axis`; all other extents must agree.
Value concat(std::span<const Value> parts, std::size_t axis);

/// Fully-connected layer: x * weight + bias, for x of shape [in] or [B x in]
/// and weight [in x out].
Value affine(const Value& x, const Value& weight, const Value& bias);

/// Pads with zero frames at the tail, or truncates keeping the first
/// `length` frames. Accepts [T x C] only.
Value zero_pad_time(const Value& x, std::size_t length);

/// Max over the time axis: [T x C] -> [C], [B x T x C] -> [B x C].
Value global_max_pool_time(const Value& x);

/// Mean over the batch of -log softmax(logits)[label], logits [B x K].
/// Throws DataError on an out-of-range label.
Value cross_entropy(const Value& logits, std::span<const std::size_t> labels);

/// scale * v + shift with scalar (single-element) scale and shift.
Value scale_shift(const Value& v, const Value& scale, const Value& shift);

Value add(const Value& a, const Value& b);

Value reshape(const Value& v, Shape shape);

/// Sum of all elements, as a [1] value.
Value sum(const Value& v);

/// Inner product of two equally shaped values, as a [1] value.
Value dot(const Value& a, const Value& b);

/// Numerically stable softmax of a plain vector (no graph).
std::vector<double> softmax(std::span<const double> logits);

/// Sum of the values in ascending order; independent of input order.
double sorted_sum(std::vector<double> terms);

}  // namespace vtm

#endif  // VTM_OPS_H_
