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

#include "vtm/ops.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "vtm/error.h"

namespace vtm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct SeqDims {
  std::size_t batch;
  std::size_t time;
  std::size_t channels;
};

SeqDims seq_dims(const Shape& s, const char* op) {
  if (s.rank() == 2) return {1, s[0], s[1]};
  if (s.rank() == 3) return {s[0], s[1], s[2]};
  throw ShapeError(std::string(op) + ": expected [T x C] or [B x T x C], got " +
                   s.str());
}

// Same rank as `like`, with new time and channel extents.
Shape seq_shape(const Shape& like, std::size_t time, std::size_t channels) {
  if (like.rank() == 2) return Shape{time, channels};
  return Shape{like[0], time, channels};
}

void require_vector(const Value& v, std::size_t n, const char* op,
                    const char* what) {
  if (v.shape().rank() != 1 || v.shape()[0] != n) {
    throw ShapeError(std::string(op) + ": " + what + " must be [" +
                     std::to_string(n) + "], got " + v.shape().str());
  }
}

void require_scalar(const Value& v, const char* op, const char* what) {
  if (v.numel() != 1) {
    throw ShapeError(std::string(op) + ": " + what + " must be scalar, got " +
                     v.shape().str());
  }
}

double sorted_sum_inplace(std::vector<double>& terms) {
  std::sort(terms.begin(), terms.end());
  double s = 0.0;
  for (double t : terms) s += t;
  return s;
}

// y[r,:] = x[r,:] * w + bias over `rows` rows. Shared by affine and
// pointwise_conv1d.
Value rowwise_affine(const Value& x, const Value& weight, const Value& bias,
                     std::size_t rows, std::size_t in, Shape out_shape,
                     const char* op) {
  if (weight.shape().rank() != 2 || weight.shape()[0] != in) {
    throw ShapeError(std::string(op) + ": weight must be [" +
                     std::to_string(in) + " x out], got " +
                     weight.shape().str());
  }
  const std::size_t out = weight.shape()[1];
  require_vector(bias, out, op, "bias");

  const auto xd = x.data();
  const auto wd = weight.data();
  const auto bd = bias.data();
  std::vector<double> y(rows * out);
  for (std::size_t r = 0; r < rows; ++r) {
    double* yr = y.data() + r * out;
    std::copy(bd.begin(), bd.end(), yr);
    for (std::size_t i = 0; i < in; ++i) {
      const double xi = xd[r * in + i];
      const double* wi = wd.data() + i * out;
      for (std::size_t o = 0; o < out; ++o) yr[o] += xi * wi[o];
    }
  }
  Value result = Value::from_op(std::move(out_shape), std::move(y), op,
                                {x, weight, bias});
  result.node().backward = [rows, in, out](Node& self) {
    Node& xn = *self.parents[0];
    Node& wn = *self.parents[1];
    Node& bn = *self.parents[2];
    const double* g = self.grad.data();
    for (std::size_t r = 0; r < rows; ++r) {
      const double* gr = g + r * out;
      for (std::size_t i = 0; i < in; ++i) {
        const double xi = xn.data[r * in + i];
        const double* wi = wn.data.data() + i * out;
        double acc = 0.0;
        if (wn.requires_grad) {
          double* dwi = wn.grad.data() + i * out;
          for (std::size_t o = 0; o < out; ++o) {
            acc += gr[o] * wi[o];
            dwi[o] += xi * gr[o];
          }
        } else {
          for (std::size_t o = 0; o < out; ++o) acc += gr[o] * wi[o];
        }
        if (xn.requires_grad) xn.grad[r * in + i] += acc;
      }
      if (bn.requires_grad) {
        for (std::size_t o = 0; o < out; ++o) bn.grad[o] += gr[o];
      }
    }
  };
  return result;
}

}  // namespace

double sorted_sum(std::vector<double> terms) {
  return sorted_sum_inplace(terms);
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> p(logits.begin(), logits.end());
  if (p.empty()) return p;
  const double mx = *std::max_element(p.begin(), p.end());
  double z = 0.0;
  for (double& v : p) {
    v = std::exp(v - mx);
    z += v;
  }
  for (double& v : p) v /= z;
  return p;
}

Value softmax_sharp(const Value& logits, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ConfigError("softmax_sharp: alpha must be positive and finite");
  }
  if (logits.shape().rank() != 1) {
    throw ShapeError("softmax_sharp: expected rank-1 logits, got " +
                     logits.shape().str());
  }
  const auto x = logits.data();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) {
      throw NumericDomainError("softmax_sharp: non-finite logit at index " +
                               std::to_string(i));
    }
  }
  const double mx = *std::max_element(x.begin(), x.end());
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = std::exp(alpha * (x[i] - mx));
  }
  const double z = sorted_sum(y);
  for (double& v : y) v /= z;

  Value out = Value::from_op(logits.shape(), std::move(y), "softmax_sharp",
                             {logits});
  out.node().backward = [alpha](Node& self) {
    Node& p = *self.parents[0];
    double s = 0.0;
    for (std::size_t i = 0; i < self.data.size(); ++i) {
      s += self.data[i] * self.grad[i];
    }
    for (std::size_t i = 0; i < self.data.size(); ++i) {
      p.grad[i] += alpha * self.data[i] * (self.grad[i] - s);
    }
  };
  return out;
}

Value l2_normalize(const Value& v) {
  if (v.shape().rank() != 1) {
    throw ShapeError("l2_normalize: expected rank-1 input, got " +
                     v.shape().str());
  }
  const auto x = v.data();
  double sq = 0.0;
  for (double e : x) sq += e * e;
  const double norm = std::sqrt(sq);
  const bool clamped = norm < kNormEpsilon;
  const double denom = clamped ? kNormEpsilon : norm;
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] / denom;

  Value out = Value::from_op(v.shape(), std::move(y), "l2_normalize", {v});
  out.node().backward = [denom, clamped](Node& self) {
    Node& p = *self.parents[0];
    double yg = 0.0;
    if (!clamped) {
      for (std::size_t i = 0; i < self.data.size(); ++i) {
        yg += self.data[i] * self.grad[i];
      }
    }
    for (std::size_t i = 0; i < self.data.size(); ++i) {
      p.grad[i] += (self.grad[i] - self.data[i] * yg) / denom;
    }
  };
  return out;
}

Value matmul(const Value& a, const Value& b) {
  if (a.shape().rank() != 2 || b.shape().rank() != 2 ||
      a.shape()[1] != b.shape()[0]) {
    throw ShapeError("matmul: incompatible shapes " + a.shape().str() + " * " +
                     b.shape().str());
  }
  const std::size_t m = a.shape()[0];
  const std::size_t k = a.shape()[1];
  const std::size_t n = b.shape()[1];
  const auto ad = a.data();
  const auto bd = b.data();
  std::vector<double> y(m * n);
  std::vector<double> terms(k);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t l = 0; l < k; ++l) terms[l] = ad[i * k + l] * bd[l * n + j];
      y[i * n + j] = sorted_sum_inplace(terms);
    }
  }
  Value out = Value::from_op(Shape{m, n}, std::move(y), "matmul", {a, b});
  out.node().backward = [m, k, n](Node& self) {
    Node& an = *self.parents[0];
    Node& bn = *self.parents[1];
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t l = 0; l < k; ++l) {
        const double ail = an.data[i * k + l];
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          const double g = self.grad[i * n + j];
          acc += g * bn.data[l * n + j];
          if (bn.requires_grad) bn.grad[l * n + j] += ail * g;
        }
        if (an.requires_grad) an.grad[i * k + l] += acc;
      }
    }
  };
  return out;
}

Value depthwise_conv1d(const Value& x, const Value& kernels) {
  const SeqDims d = seq_dims(x.shape(), "depthwise_conv1d");
  if (kernels.shape().rank() != 2 || kernels.shape()[1] != d.channels) {
    throw ShapeError("depthwise_conv1d: kernels must be [k x " +
                     std::to_string(d.channels) + "], got " +
                     kernels.shape().str());
  }
  const std::size_t k = kernels.shape()[0];
  if (k % 2 == 0) {
    throw ConfigError("depthwise_conv1d: kernel length must be odd, got " +
                      std::to_string(k));
  }
  const std::ptrdiff_t pad = static_cast<std::ptrdiff_t>(k / 2);
  const std::ptrdiff_t T = static_cast<std::ptrdiff_t>(d.time);
  const std::size_t C = d.channels;
  const auto xd = x.data();
  const auto kd = kernels.data();
  std::vector<double> y(xd.size(), 0.0);
  for (std::size_t b = 0; b < d.batch; ++b) {
    const std::size_t base = b * d.time * C;
    for (std::ptrdiff_t t = 0; t < T; ++t) {
      double* yt = y.data() + base + t * C;
      for (std::size_t j = 0; j < k; ++j) {
        const std::ptrdiff_t src = t + static_cast<std::ptrdiff_t>(j) - pad;
        if (src < 0 || src >= T) continue;
        const double* xs = xd.data() + base + src * C;
        const double* kj = kd.data() + j * C;
        for (std::size_t c = 0; c < C; ++c) yt[c] += kj[c] * xs[c];
      }
    }
  }
  Value out = Value::from_op(x.shape(), std::move(y), "depthwise_conv1d",
                             {x, kernels});
  out.node().backward = [d, k, pad](Node& self) {
    Node& xn = *self.parents[0];
    Node& kn = *self.parents[1];
    const std::ptrdiff_t T = static_cast<std::ptrdiff_t>(d.time);
    const std::size_t C = d.channels;
    for (std::size_t b = 0; b < d.batch; ++b) {
      const std::size_t base = b * d.time * C;
      for (std::ptrdiff_t t = 0; t < T; ++t) {
        const double* gt = self.grad.data() + base + t * C;
        for (std::size_t j = 0; j < k; ++j) {
          const std::ptrdiff_t src = t + static_cast<std::ptrdiff_t>(j) - pad;
          if (src < 0 || src >= T) continue;
          for (std::size_t c = 0; c < C; ++c) {
            if (xn.requires_grad) {
              xn.grad[base + src * C + c] += gt[c] * kn.data[j * C + c];
            }
            if (kn.requires_grad) {
              kn.grad[j * C + c] += gt[c] * xn.data[base + src * C + c];
            }
          }
        }
      }
    }
  };
  return out;
}

Value pointwise_conv1d(const Value& x, const Value& weight, const Value& bias) {
  const SeqDims d = seq_dims(x.shape(), "pointwise_conv1d");
  if (weight.shape().rank() != 2) {
    throw ShapeError("pointwise_conv1d: weight must be rank 2, got " +
                     weight.shape().str());
  }
  return rowwise_affine(x, weight, bias, d.batch * d.time, d.channels,
                        seq_shape(x.shape(), d.time, weight.shape()[1]),
                        "pointwise_conv1d");
}

BatchNormState BatchNormState::identity(std::size_t channels) {
  return BatchNormState{std::vector<double>(channels, 0.0),
                        std::vector<double>(channels, 1.0)};
}

namespace {

void check_bn_args(const SeqDims& d, const Value& gamma, const Value& beta,
                   const BatchNormState& state, const char* op) {
  require_vector(gamma, d.channels, op, "gamma");
  require_vector(beta, d.channels, op, "beta");
  if (state.running_mean.size() != d.channels ||
      state.running_var.size() != d.channels) {
    throw ShapeError(std::string(op) + ": running statistics sized for " +
                     std::to_string(state.running_mean.size()) +
                     " channels, input has " + std::to_string(d.channels));
  }
}

}  // namespace

Value batch_norm_train(const Value& x, const Value& gamma, const Value& beta,
                       BatchNormState& state) {
  const SeqDims d = seq_dims(x.shape(), "batch_norm");
  check_bn_args(d, gamma, beta, state, "batch_norm");
  const std::size_t count = d.batch * d.time;
  if (count < 2) {
    throw ConfigError("batch_norm: train mode needs B*T >= 2, got " +
                      std::to_string(count));
  }
  const std::size_t C = d.channels;
  const auto xd = x.data();
  std::vector<double> mean(C, 0.0), var(C, 0.0);
  for (std::size_t r = 0; r < count; ++r) {
    for (std::size_t c = 0; c < C; ++c) mean[c] += xd[r * C + c];
  }
  for (double& m : mean) m /= static_cast<double>(count);
  for (std::size_t r = 0; r < count; ++r) {
    for (std::size_t c = 0; c < C; ++c) {
      const double dv = xd[r * C + c] - mean[c];
      var[c] += dv * dv;
    }
  }
  for (double& v : var) v /= static_cast<double>(count);

  std::vector<double> inv_std(C);
  for (std::size_t c = 0; c < C; ++c) {
    inv_std[c] = 1.0 / std::sqrt(var[c] + kBatchNormEpsilon);
  }
  const auto gd = gamma.data();
  const auto bd = beta.data();
  std::vector<double> xhat(xd.size()), y(xd.size());
  for (std::size_t r = 0; r < count; ++r) {
    for (std::size_t c = 0; c < C; ++c) {
      const std::size_t i = r * C + c;
      xhat[i] = (xd[i] - mean[c]) * inv_std[c];
      y[i] = gd[c] * xhat[i] + bd[c];
    }
  }

  const double unbias =
      static_cast<double>(count) / static_cast<double>(count - 1);
  for (std::size_t c = 0; c < C; ++c) {
    state.running_mean[c] = kBatchNormMomentum * state.running_mean[c] +
                            (1.0 - kBatchNormMomentum) * mean[c];
    state.running_var[c] = kBatchNormMomentum * state.running_var[c] +
                           (1.0 - kBatchNormMomentum) * var[c] * unbias;
  }

  Value out = Value::from_op(x.shape(), std::move(y), "batch_norm_train",
                             {x, gamma, beta});
  out.node().backward = [count, C, xhat = std::move(xhat),
                         inv_std = std::move(inv_std)](Node& self) {
    Node& xn = *self.parents[0];
    Node& gn = *self.parents[1];
    Node& bn = *self.parents[2];
    const double n = static_cast<double>(count);
    std::vector<double> sum_g(C, 0.0), sum_gx(C, 0.0);
    for (std::size_t r = 0; r < count; ++r) {
      for (std::size_t c = 0; c < C; ++c) {
        const std::size_t i = r * C + c;
        sum_g[c] += self.grad[i];
        sum_gx[c] += self.grad[i] * xhat[i];
      }
    }
    if (gn.requires_grad) {
      for (std::size_t c = 0; c < C; ++c) gn.grad[c] += sum_gx[c];
    }
    if (bn.requires_grad) {
      for (std::size_t c = 0; c < C; ++c) bn.grad[c] += sum_g[c];
    }
    if (xn.requires_grad) {
      for (std::size_t r = 0; r < count; ++r) {
        for (std::size_t c = 0; c < C; ++c) {
          const std::size_t i = r * C + c;
          xn.grad[i] += gn.data[c] * inv_std[c] / n *
                        (n * self.grad[i] - sum_g[c] - xhat[i] * sum_gx[c]);
        }
      }
    }
  };
  return out;
}

Value batch_norm_infer(const Value& x, const Value& gamma, const Value& beta,
                       const BatchNormState& state) {
  const SeqDims d = seq_dims(x.shape(), "batch_norm");
  check_bn_args(d, gamma, beta, state, "batch_norm");
  const std::size_t count = d.batch * d.time;
  const std::size_t C = d.channels;
  std::vector<double> mean = state.running_mean;
  std::vector<double> inv_std(C);
  for (std::size_t c = 0; c < C; ++c) {
    inv_std[c] = 1.0 / std::sqrt(state.running_var[c] + kBatchNormEpsilon);
  }
  const auto xd = x.data();
  const auto gd = gamma.data();
  const auto bd = beta.data();
  std::vector<double> y(xd.size());
  for (std::size_t r = 0; r < count; ++r) {
    for (std::size_t c = 0; c < C; ++c) {
      const std::size_t i = r * C + c;
      y[i] = gd[c] * (xd[i] - mean[c]) * inv_std[c] + bd[c];
    }
  }
  Value out = Value::from_op(x.shape(), std::move(y), "batch_norm_infer",
                             {x, gamma, beta});
  out.node().backward = [count, C, mean = std::move(mean),
                         inv_std = std::move(inv_std)](Node& self) {
    Node& xn = *self.parents[0];
    Node& gn = *self.parents[1];
    Node& bn = *self.parents[2];
    for (std::size_t r = 0; r < count; ++r) {
      for (std::size_t c = 0; c < C; ++c) {
        const std::size_t i = r * C + c;
        const double g = self.grad[i];
        if (xn.requires_grad) xn.grad[i] += g * gn.data[c] * inv_std[c];
        if (gn.requires_grad) {
          gn.grad[c] += g * (xn.data[i] - mean[c]) * inv_std[c];
        }
        if (bn.requires_grad) bn.grad[c] += g;
      }
    }
  };
  return out;
}

Value batch_norm(const Value& x, const Value& gamma, const Value& beta,
                 BatchNormState& state, Mode mode) {
  if (mode == Mode::kTrain) return batch_norm_train(x, gamma, beta, state);
  return batch_norm_infer(x, gamma, beta, state);
}

namespace {

// Max over x[b, t, c] for t in [begin, end). Returns the first argmax and
// the gap to the runner-up (infinity for single-frame windows).
struct WindowMax {
  std::size_t arg;
  double value;
  double gap;
};

WindowMax window_max(std::span<const double> xd, std::size_t base,
                     std::size_t C, std::size_t c, std::size_t begin,
                     std::size_t end) {
  WindowMax w{begin, xd[base + begin * C + c], kInf};
  double second = -kInf;
  for (std::size_t t = begin + 1; t < end; ++t) {
    const double v = xd[base + t * C + c];
    if (v > w.value) {
      second = w.value;
      w.value = v;
      w.arg = t;
    } else if (v > second) {
      second = v;
    }
  }
  if (end - begin >= 2) w.gap = w.value - second;
  return w;
}

// Pools [begin_i, end_i) windows of the time axis. Output time extent is
// bounds.size() - 1.
Value windowed_max(const Value& x, const std::vector<std::size_t>& bounds,
                   Shape out_shape, const char* op) {
  const SeqDims d = seq_dims(x.shape(), op);
  const std::size_t n = bounds.size() - 1;
  const std::size_t C = d.channels;
  const auto xd = x.data();
  std::vector<double> y(d.batch * n * C);
  std::vector<std::size_t> arg(y.size());
  double margin = kInf;
  for (std::size_t b = 0; b < d.batch; ++b) {
    const std::size_t base = b * d.time * C;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < C; ++c) {
        WindowMax w = window_max(xd, base, C, c, bounds[i], bounds[i + 1]);
        const std::size_t o = (b * n + i) * C + c;
        y[o] = w.value;
        arg[o] = base + w.arg * C + c;
        margin = std::min(margin, w.gap);
      }
    }
  }
  Value out = Value::from_op(std::move(out_shape), std::move(y), op, {x});
  if (x.requires_grad()) out.node().kink_margin = margin;
  out.node().backward = [arg = std::move(arg)](Node& self) {
    Node& p = *self.parents[0];
    for (std::size_t o = 0; o < arg.size(); ++o) p.grad[arg[o]] += self.grad[o];
  };
  return out;
}

}  // namespace

Value adaptive_max_pool1d(const Value& x, std::size_t segments) {
  const SeqDims d = seq_dims(x.shape(), "adaptive_max_pool1d");
  if (segments == 0 || segments > d.time) {
    throw ConfigError("adaptive_max_pool1d: need 1 <= n <= T, got n=" +
                      std::to_string(segments) + ", T=" +
                      std::to_string(d.time));
  }
  std::vector<std::size_t> bounds(segments + 1);
  for (std::size_t i = 0; i <= segments; ++i) bounds[i] = i * d.time / segments;
  return windowed_max(x, bounds, seq_shape(x.shape(), segments, d.channels),
                      "adaptive_max_pool1d");
}

Value global_max_pool_time(const Value& x) {
  const SeqDims d = seq_dims(x.shape(), "global_max_pool_time");
  Shape out_shape = x.shape().rank() == 2 ? Shape{d.channels}
                                          : Shape{d.batch, d.channels};
  return windowed_max(x, {0, d.time}, std::move(out_shape),
                      "global_max_pool_time");
}

Value relu(const Value& x) {
  const auto xd = x.data();
  std::vector<double> y(xd.size());
  double margin = kInf;
  for (std::size_t i = 0; i < xd.size(); ++i) {
    y[i] = xd[i] > 0.0 ? xd[i] : 0.0;
    margin = std::min(margin, std::abs(xd[i]));
  }
  Value out = Value::from_op(x.shape(), std::move(y), "relu", {x});
  if (x.requires_grad()) out.node().kink_margin = margin;
  out.node().backward = [](Node& self) {
    Node& p = *self.parents[0];
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      if (p.data[i] > 0.0) p.grad[i] += self.grad[i];
    }
  };
  return out;
}

Value concat(std::span<const Value> parts, std::size_t axis) {
  if (parts.empty()) throw ShapeError("concat: no inputs");
  const Shape& first = parts[0].shape();
  if (axis >= first.rank()) {
    throw ShapeError("concat: axis " + std::to_string(axis) +
                     " out of range for " + first.str());
  }
  std::size_t total = 0;
  for (const Value& p : parts) {
    const Shape& s = p.shape();
    bool ok = s.rank() == first.rank();
    for (std::size_t a = 0; ok && a < s.rank(); ++a) {
      if (a != axis && s[a] != first[a]) ok = false;
    }
    if (!ok) {
      throw ShapeError("concat: " + s.str() + " does not match " +
                       first.str() + " off axis " + std::to_string(axis));
    }
    total += s[axis];
  }
  std::size_t outer = 1, inner = 1;
  for (std::size_t a = 0; a < axis; ++a) outer *= first[a];
  for (std::size_t a = axis + 1; a < first.rank(); ++a) inner *= first[a];

  std::vector<std::size_t> dims = first.dims();
  dims[axis] = total;
  std::vector<double> y(outer * total * inner);
  std::vector<std::size_t> widths;  // block width per part
  std::size_t offset = 0;
  for (const Value& p : parts) {
    const std::size_t w = p.shape()[axis] * inner;
    const auto pd = p.data();
    for (std::size_t o = 0; o < outer; ++o) {
      std::copy_n(pd.begin() + o * w, w, y.begin() + o * total * inner + offset);
    }
    widths.push_back(w);
    offset += w;
  }
  Value out = Value::from_op(Shape(std::move(dims)), std::move(y), "concat",
                             std::vector<Value>(parts.begin(), parts.end()));
  out.node().backward = [outer, row = total * inner,
                         widths = std::move(widths)](Node& self) {
    std::size_t offset = 0;
    for (std::size_t i = 0; i < widths.size(); ++i) {
      Node& p = *self.parents[i];
      if (p.requires_grad) {
        for (std::size_t o = 0; o < outer; ++o) {
          for (std::size_t j = 0; j < widths[i]; ++j) {
            p.grad[o * widths[i] + j] += self.grad[o * row + offset + j];
          }
        }
      }
      offset += widths[i];
    }
  };
  return out;
}

Value affine(const Value& x, const Value& weight, const Value& bias) {
  const Shape& s = x.shape();
  if (s.rank() == 1) {
    if (weight.shape().rank() != 2) {
      throw ShapeError("affine: weight must be rank 2, got " +
                       weight.shape().str());
    }
    return rowwise_affine(x, weight, bias, 1, s[0], Shape{weight.shape()[1]},
                          "affine");
  }
  if (s.rank() == 2) {
    if (weight.shape().rank() != 2) {
      throw ShapeError("affine: weight must be rank 2, got " +
                       weight.shape().str());
    }
    return rowwise_affine(x, weight, bias, s[0], s[1],
                          Shape{s[0], weight.shape()[1]}, "affine");
  }
  throw ShapeError("affine: expected [in] or [B x in], got " + s.str());
}

Value zero_pad_time(const Value& x, std::size_t length) {
  if (x.shape().rank() != 2) {
    throw ShapeError("zero_pad_time: expected [T x C], got " + x.shape().str());
  }
  if (length == 0) throw ConfigError("zero_pad_time: length must be >= 1");
  const std::size_t T = x.shape()[0];
  const std::size_t C = x.shape()[1];
  const std::size_t kept = std::min(T, length) * C;
  std::vector<double> y(length * C, 0.0);
  std::copy_n(x.data().begin(), kept, y.begin());
  Value out = Value::from_op(Shape{length, C}, std::move(y), "zero_pad_time",
                             {x});
  out.node().backward = [kept](Node& self) {
    Node& p = *self.parents[0];
    for (std::size_t i = 0; i < kept; ++i) p.grad[i] += self.grad[i];
  };
  return out;
}

Value cross_entropy(const Value& logits, std::span<const std::size_t> labels) {
  const Shape& s = logits.shape();
  if (s.rank() > 2) {
    throw ShapeError("cross_entropy: expected [B x K] logits, got " + s.str());
  }
  const std::size_t B = s.rank() == 2 ? s[0] : 1;
  const std::size_t K = s.rank() == 2 ? s[1] : s[0];
  if (labels.size() != B) {
    throw ShapeError("cross_entropy: " + std::to_string(labels.size()) +
                     " labels for batch of " + std::to_string(B));
  }
  const auto z = logits.data();
  std::vector<double> probs(B * K);
  double total = 0.0;
  for (std::size_t b = 0; b < B; ++b) {
    if (labels[b] >= K) {
      throw DataError("cross_entropy: label " + std::to_string(labels[b]) +
                      " out of range for " + std::to_string(K) + " classes");
    }
    const double* zb = z.data() + b * K;
    const double mx = *std::max_element(zb, zb + K);
    double se = 0.0;
    for (std::size_t k = 0; k < K; ++k) se += std::exp(zb[k] - mx);
    const double lse = mx + std::log(se);
    total += lse - zb[labels[b]];
    for (std::size_t k = 0; k < K; ++k) {
      probs[b * K + k] = std::exp(zb[k] - lse);
    }
  }
  Value out = Value::from_op(Shape{1}, {total / static_cast<double>(B)},
                             "cross_entropy", {logits});
  out.node().backward = [B, K, probs = std::move(probs),
                         lab = std::vector<std::size_t>(labels.begin(),
                                                        labels.end())](
                            Node& self) {
    Node& p = *self.parents[0];
    const double scale = self.grad[0] / static_cast<double>(B);
    for (std::size_t b = 0; b < B; ++b) {
      for (std::size_t k = 0; k < K; ++k) {
        const double target = k == lab[b] ? 1.0 : 0.0;
        p.grad[b * K + k] += scale * (probs[b * K + k] - target);
      }
    }
  };
  return out;
}

Value scale_shift(const Value& v, const Value& scale, const Value& shift) {
  require_scalar(scale, "scale_shift", "scale");
  require_scalar(shift, "scale_shift", "shift");
  const double a = scale.data()[0];
  const double b = shift.data()[0];
  const auto x = v.data();
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = a * x[i] + b;
  Value out =
      Value::from_op(v.shape(), std::move(y), "scale_shift", {v, scale, shift});
  out.node().backward = [](Node& self) {
    Node& vn = *self.parents[0];
    Node& an = *self.parents[1];
    Node& bn = *self.parents[2];
    const double a = an.data[0];
    double ga = 0.0, gb = 0.0;
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      const double g = self.grad[i];
      if (vn.requires_grad) vn.grad[i] += a * g;
      ga += g * vn.data[i];
      gb += g;
    }
    if (an.requires_grad) an.grad[0] += ga;
    if (bn.requires_grad) bn.grad[0] += gb;
  };
  return out;
}

Value add(const Value& a, const Value& b) {
  if (!(a.shape() == b.shape())) {
    throw ShapeError("add: " + a.shape().str() + " vs " + b.shape().str());
  }
  const auto ad = a.data();
  const auto bd = b.data();
  std::vector<double> y(ad.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = ad[i] + bd[i];
  Value out = Value::from_op(a.shape(), std::move(y), "add", {a, b});
  out.node().backward = [](Node& self) {
    for (const NodePtr& p : self.parents) {
      if (!p->requires_grad) continue;
      for (std::size_t i = 0; i < self.grad.size(); ++i) {
        p->grad[i] += self.grad[i];
      }
    }
  };
  return out;
}

Value reshape(const Value& v, Shape shape) {
  if (shape.numel() != v.numel()) {
    throw ShapeError("reshape: cannot view " + v.shape().str() + " as " +
                     shape.str());
  }
  std::vector<double> y(v.data().begin(), v.data().end());
  Value out = Value::from_op(std::move(shape), std::move(y), "reshape", {v});
  out.node().backward = [](Node& self) {
    Node& p = *self.parents[0];
    for (std::size_t i = 0; i < self.grad.size(); ++i) p.grad[i] += self.grad[i];
  };
  return out;
}

Value sum(const Value& v) {
  double s = 0.0;
  for (double e : v.data()) s += e;
  Value out = Value::from_op(Shape{1}, {s}, "sum", {v});
  out.node().backward = [](Node& self) {
    Node& p = *self.parents[0];
    for (double& g : p.grad) g += self.grad[0];
  };
  return out;
}

Value dot(const Value& a, const Value& b) {
  if (!(a.shape() == b.shape())) {
    throw ShapeError("dot: " + a.shape().str() + " vs " + b.shape().str());
  }
  double s = 0.0;
  const auto ad = a.data();
  const auto bd = b.data();
  for (std::size_t i = 0; i < ad.size(); ++i) s += ad[i] * bd[i];
  Value out = Value::from_op(Shape{1}, {s}, "dot", {a, b});
  out.node().backward = [](Node& self) {
    Node& an = *self.parents[0];
    Node& bn = *self.parents[1];
    const double g = self.grad[0];
    // a and b may be the same node; read data before either grad update.
    for (std::size_t i = 0; i < an.data.size(); ++i) {
      const double ai = an.data[i];
      const double bi = bn.data[i];
      if (an.requires_grad) an.grad[i] += g * bi;
      if (bn.requires_grad) bn.grad[i] += g * ai;
    }
  };
  return out;
}

}  // namespace vtm
