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


#include "vtm/gradcheck.h"

#include <algorithm>
#include <functional>
#include <utility>

#include "vtm/error.h"
#include "vtm/fd_check.h"
#include "vtm/model.h"
#include "vtm/ops.h"
#include "vtm/rng.h"
#include "vtm/satt.h"
#include "vtm/txn.h"

namespace vtm {

namespace {

struct GradCase {
  std::vector<Value> params;
  std::function<Value()> loss;
  // Keeps models and other owners of the parameters alive.
  std::shared_ptr<void> owner;
};

using CaseBuilder = std::function<GradCase(Rng&)>;

Value random_param(Shape shape, Rng& rng, double sd = 1.0) {
  const std::size_t n = shape.numel();
  return Value::parameter(std::move(shape), normal_init(n, sd * sd, rng));
}

// Contracts an arbitrary output with a fixed random tensor so every output
// coordinate contributes to the scalar loss.
GradCase projected(std::vector<Value> params, std::function<Value()> fwd,
                   Rng& rng) {
  const std::size_t n = fwd().numel();
  Value r = Value::constant(Shape{n}, normal_init(n, 1.0, rng));
  return {std::move(params),
          [fwd = std::move(fwd), r] {
            Value y = fwd();
            return dot(reshape(y, Shape{y.numel()}), r);
          },
          nullptr};
}

VideoSample random_video(const std::string& id,
                         const std::vector<std::pair<std::string, std::size_t>>&
                             modalities,
                         std::size_t frames, std::size_t num_classes, Rng& rng) {
  VideoSample s;
  s.id = id;
  s.label = rng.index(num_classes);
  for (const auto& [name, dim] : modalities) {
    FeatureSequence seq{name, frames, dim, normal_init(frames * dim, 1.0, rng)};
    s.sequences.emplace(name, std::move(seq));
  }
  return s;
}

GradCase model_case(std::shared_ptr<Model> model,
                    std::shared_ptr<std::vector<VideoSample>> videos,
                    Mode mode) {
  GradCase c;
  for (const NamedParam& p : model->parameters()) c.params.push_back(p.value);
  std::vector<std::size_t> labels;
  for (const VideoSample& v : *videos) labels.push_back(v.label);
  c.loss = [model, videos, labels, mode] {
    std::vector<const VideoSample*> batch;
    for (const VideoSample& v : *videos) batch.push_back(&v);
    return cross_entropy(model->forward(batch, mode), labels);
  };
  c.owner = model;
  return c;
}

const std::vector<std::pair<std::string, CaseBuilder>>& registry() {
  static const auto* checks = new std::vector<
      std::pair<std::string, CaseBuilder>>{
      {"softmax_sharp",
       [](Rng& rng) {
         Value x = random_param(Shape{5}, rng);
         const double alpha = rng.uniform(0.5, 3.0);
         return projected({x}, [=] { return softmax_sharp(x, alpha); }, rng);
       }},
      {"l2_normalize",
       [](Rng& rng) {
         Value x = random_param(Shape{6}, rng);
         return projected({x}, [=] { return l2_normalize(x); }, rng);
       }},
      {"matmul",
       [](Rng& rng) {
         Value a = random_param(Shape{3, 4}, rng);
         Value b = random_param(Shape{4, 2}, rng);
         return projected({a, b}, [=] { return matmul(a, b); }, rng);
       }},
      {"depthwise_conv1d",
       [](Rng& rng) {
         Value x = random_param(Shape{6, 3}, rng);
         Value k = random_param(Shape{3, 3}, rng);
         return projected({x, k}, [=] { return depthwise_conv1d(x, k); }, rng);
       }},
      {"pointwise_conv1d",
       [](Rng& rng) {
         Value x = random_param(Shape{2, 4, 3}, rng);
         Value w = random_param(Shape{3, 2}, rng);
         Value b = random_param(Shape{2}, rng);
         return projected({x, w, b}, [=] { return pointwise_conv1d(x, w, b); },
                          rng);
       }},
      {"batch_norm_train",
       [](Rng& rng) {
         Value x = random_param(Shape{2, 4, 3}, rng);
         Value g = random_param(Shape{3}, rng);
         Value b = random_param(Shape{3}, rng);
         return projected({x, g, b},
                          [=] {
                            BatchNormState st = BatchNormState::identity(3);
                            return batch_norm_train(x, g, b, st);
                          },
                          rng);
       }},
      {"batch_norm_infer",
       [](Rng& rng) {
         Value x = random_param(Shape{2, 4, 3}, rng);
         Value g = random_param(Shape{3}, rng);
         Value b = random_param(Shape{3}, rng);
         BatchNormState st = BatchNormState::identity(3);
         for (std::size_t c = 0; c < 3; ++c) {
           st.running_mean[c] = rng.normal();
           st.running_var[c] = rng.uniform(0.5, 2.0);
         }
         return projected(
             {x, g, b}, [=] { return batch_norm_infer(x, g, b, st); }, rng);
       }},
      {"adaptive_max_pool1d",
       [](Rng& rng) {
         Value x = random_param(Shape{7, 3}, rng);
         return projected({x}, [=] { return adaptive_max_pool1d(x, 3); }, rng);
       }},
      {"relu",
       [](Rng& rng) {
         Value x = random_param(Shape{8}, rng);
         return projected({x}, [=] { return relu(x); }, rng);
       }},
      {"concat",
       [](Rng& rng) {
         Value a = random_param(Shape{2, 3}, rng);
         Value b = random_param(Shape{2, 2}, rng);
         return projected({a, b},
                          [=] {
                            const Value parts[] = {a, b};
                            return concat(parts, 1);
                          },
                          rng);
       }},
      {"affine",
       [](Rng& rng) {
         Value x = random_param(Shape{3, 4}, rng);
         Value w = random_param(Shape{4, 5}, rng);
         Value b = random_param(Shape{5}, rng);
         return projected({x, w, b}, [=] { return affine(x, w, b); }, rng);
       }},
      {"zero_pad_time",
       [](Rng& rng) {
         Value x = random_param(Shape{5, 2}, rng);
         const std::size_t len = 3 + rng.index(5);
         return projected({x}, [=] { return zero_pad_time(x, len); }, rng);
       }},
      {"global_max_pool_time",
       [](Rng& rng) {
         Value x = random_param(Shape{2, 5, 3}, rng);
         return projected({x}, [=] { return global_max_pool_time(x); }, rng);
       }},
      {"cross_entropy",
       [](Rng& rng) {
         Value z = random_param(Shape{4, 5}, rng);
         std::vector<std::size_t> labels(4);
         for (auto& l : labels) l = rng.index(5);
         return GradCase{{z}, [=] { return cross_entropy(z, labels); }, nullptr};
       }},
      {"scale_shift",
       [](Rng& rng) {
         Value v = random_param(Shape{4}, rng);
         Value a = random_param(Shape{1}, rng);
         Value b = random_param(Shape{1}, rng);
         return projected({v, a, b}, [=] { return scale_shift(v, a, b); }, rng);
       }},
      {"satt",
       [](Rng& rng) {
         Value x = random_param(Shape{5, 4}, rng);
         SattHeadParams h{random_param(Shape{4}, rng),
                          random_param(Shape{1}, rng),
                          random_param(Shape{1}, rng)};
         const double alpha = rng.uniform(0.5, 2.0);
         return projected({x, h.w, h.a, h.b},
                          [=] { return satt(x, h, alpha); }, rng);
       }},
      {"attention_group",
       [](Rng& rng) {
         Value x = random_param(Shape{5, 3}, rng);
         std::vector<SattHeadParams> heads;
         std::vector<Value> params{x};
         for (int i = 0; i < 2; ++i) {
           heads.push_back({random_param(Shape{3}, rng),
                            random_param(Shape{1}, rng),
                            random_param(Shape{1}, rng)});
           params.insert(params.end(),
                         {heads.back().w, heads.back().a, heads.back().b});
         }
         return projected(params,
                          [=] { return attention_group(x, heads, 1.0); }, rng);
       }},
      {"temporal_conv_block",
       [](Rng& rng) {
         Value x = random_param(Shape{2, 5, 3}, rng);
         auto block = TemporalConvBlockParams::init(3, 3, rng);
         std::vector<Value> params{x};
         for (auto& l : block.layers) {
           l.beta = random_param(Shape{3}, rng, 0.5);
           params.insert(params.end(), {l.depthwise, l.pointwise,
                                        l.pointwise_bias, l.gamma, l.beta});
         }
         return projected(params,
                          [=] { return temporal_conv_block(x, block); }, rng);
       }},
      {"satt_head",
       [](Rng& rng) {
         SattNetConfig cfg;
         cfg.groups = {{"rgb", 4, 2, 1.0}, {"flow", 3, 2, 2.0}};
         cfg.num_classes = 3;
         auto model = std::make_shared<SattNet>(cfg, rng.next_u64());
         for (std::size_t g = 0; g < 2; ++g) {
           for (auto& h : model->group_heads(g)) {
             h.a.mutable_data()[0] = rng.uniform(0.5, 1.5);
             h.b.mutable_data()[0] = rng.normal(0.0, 0.3);
           }
         }
         auto videos = std::make_shared<std::vector<VideoSample>>();
         for (int i = 0; i < 2; ++i) {
           videos->push_back(random_video("v" + std::to_string(i),
                                          {{"rgb", 4}, {"flow", 3}}, 5, 3,
                                          rng));
         }
         return model_case(model, videos, Mode::kInfer);
       }},
      {"txn_head",
       [](Rng& rng) {
         // Sequences at least as long as pad_len keep zero frames out of the
         // pooled input, where ties would sit exactly on a max kink.
         TxnConfig cfg;
         cfg.streams = {{"rgb", 3, 6, 3, 3, 3, 1}, {"flow", 2, 6, 2, 3, 3, 1}};
         cfg.num_classes = 3;
         auto model = std::make_shared<TxnNet>(cfg, rng.next_u64());
         for (std::size_t s = 0; s < 2; ++s) {
           for (auto& b : model->stream(s).blocks) {
             for (auto& l : b.layers) {
               for (double& v : l.beta.mutable_data()) v = rng.normal(0.0, 0.5);
               for (std::size_t c = 0; c < 3; ++c) {
                 l.bn.running_mean[c] = rng.normal(0.0, 0.5);
                 l.bn.running_var[c] = rng.uniform(0.5, 2.0);
               }
             }
           }
         }
         for (double& v : model->classifier_weight().mutable_data()) {
           v = rng.normal();
         }
         auto videos = std::make_shared<std::vector<VideoSample>>();
         for (int i = 0; i < 2; ++i) {
           videos->push_back(random_video("v" + std::to_string(i),
                                          {{"rgb", 3}, {"flow", 2}}, 6 + i, 3,
                                          rng));
         }
         return model_case(model, videos, Mode::kInfer);
       }},
  };
  return *checks;
}

GradcheckResult run_one(const std::string& name, const CaseBuilder& build,
                        const GradcheckOptions& opt) {
  GradcheckResult result{name, 0.0, 0, 0, true};
  for (std::size_t s = 0; s < opt.num_seeds; ++s) {
    Rng rng(derive_seed(opt.seed, s));
    for (std::size_t attempt = 0;; ++attempt) {
      GradCase c = build(rng);
      FdReport rep = fd_check(c.loss, c.params, opt.step, opt.tol);
      if (rep.kink_margin < opt.min_kink_margin) {
        if (attempt + 1 >= opt.max_redraws) {
          result.passed = false;
          break;
        }
        ++result.redraws;
        continue;
      }
      result.max_rel_error = std::max(result.max_rel_error, rep.max_rel_error);
      result.coordinates += rep.coordinates;
      result.passed = result.passed && rep.passed;
      break;
    }
  }
  return result;
}

}  // namespace

std::vector<std::string> gradcheck_names() {
  std::vector<std::string> names;
  for (const auto& [name, _] : registry()) names.push_back(name);
  return names;
}

std::vector<GradcheckResult> run_gradcheck(const std::string& name,
                                           const GradcheckOptions& options) {
  std::vector<GradcheckResult> out;
  for (const auto& [n, build] : registry()) {
    if (name == "all" || name == n) out.push_back(run_one(n, build, options));
  }
  if (out.empty()) {
    std::string valid = "all";
    for (const auto& n : gradcheck_names()) valid += ", " + n;
    throw ConfigError("unknown gradcheck op '" + name + "'; valid: " + valid);
  }
  return out;
}

}  // namespace vtm
