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

#include "vtm/txn.h"

#include "vtm/error.h"

namespace vtm {

namespace {

// Keeps the initial logits small so the first loss sits near ln K.
constexpr double kClassifierInitScale = 0.01;

Value separable_layer(const Value& x, const SeparableLayerParams& p,
                      BatchNormState* train_state) {
  Value h = pointwise_conv1d(depthwise_conv1d(x, p.depthwise), p.pointwise,
                             p.pointwise_bias);
  h = train_state ? batch_norm_train(h, p.gamma, p.beta, *train_state)
                  : batch_norm_infer(h, p.gamma, p.beta, p.bn);
  return relu(h);
}

Value block_impl(const Value& x, const TemporalConvBlockParams& p,
                 TemporalConvBlockParams* train) {
  const std::size_t C = p.layers[0].gamma.numel();
  const std::size_t width = x.shape()[x.shape().rank() - 1];
  if (width != C) {
    throw ShapeError("temporal_conv_block: input has " + std::to_string(width) +
                     " channels, block expects " + std::to_string(C));
  }
  Value h = x;
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    h = separable_layer(h, p.layers[l], train ? &train->layers[l].bn : nullptr);
  }
  return add(x, h);
}

Value stream_impl(std::span<const FeatureSequence* const> seqs,
                  const TxnStreamConfig& cfg, const TxnStreamParams& p,
                  TxnStreamParams* train) {
  if (seqs.empty()) throw DataError("txn: empty batch");
  std::vector<Value> inputs;
  inputs.reserve(seqs.size());
  for (const FeatureSequence* s : seqs) {
    Value x = txn_stream_input(*s, cfg);
    inputs.push_back(reshape(x, Shape{1, cfg.num_segments, cfg.feature_dim}));
  }
  Value h = pointwise_conv1d(concat(inputs, 0), p.entry_weight, p.entry_bias);
  for (std::size_t b = 0; b < p.blocks.size(); ++b) {
    h = block_impl(h, p.blocks[b], train ? &train->blocks[b] : nullptr);
  }
  return global_max_pool_time(h);
}

TxnStreamParams init_stream(const TxnStreamConfig& cfg, Rng& rng) {
  TxnStreamParams p;
  p.entry_weight = Value::parameter(
      Shape{cfg.feature_dim, cfg.channels},
      normal_init(cfg.feature_dim * cfg.channels,
                  1.0 / static_cast<double>(cfg.feature_dim), rng));
  p.entry_bias = Value::zeros(Shape{cfg.channels}, true);
  for (std::size_t b = 0; b < cfg.num_blocks; ++b) {
    p.blocks.push_back(
        TemporalConvBlockParams::init(cfg.kernel_size, cfg.channels, rng));
  }
  return p;
}

}  // namespace

void TxnStreamConfig::validate() const {
  const std::string who = "txn stream '" + modality + "': ";
  if (feature_dim == 0) throw ConfigError(who + "feature_dim must be >= 1");
  if (pad_len == 0) throw ConfigError(who + "pad_len must be >= 1");
  if (num_segments == 0 || num_segments > pad_len) {
    throw ConfigError(who + "need 1 <= num_segments <= pad_len");
  }
  if (kernel_size % 2 == 0) {
    throw ConfigError(who + "kernel_size must be odd, got " +
                      std::to_string(kernel_size));
  }
  if (channels == 0) throw ConfigError(who + "channels must be >= 1");
}

void TxnConfig::validate() const {
  if (streams.empty()) throw ConfigError("txn: at least one stream required");
  if (num_classes == 0) throw ConfigError("txn: num_classes must be >= 1");
  for (const auto& s : streams) s.validate();
}

TemporalConvBlockParams TemporalConvBlockParams::init(std::size_t kernel,
                                                      std::size_t channels,
                                                      Rng& rng) {
  TemporalConvBlockParams p;
  for (SeparableLayerParams& l : p.layers) {
    l.depthwise = Value::parameter(
        Shape{kernel, channels},
        normal_init(kernel * channels, 1.0 / static_cast<double>(kernel), rng));
    l.pointwise = Value::parameter(
        Shape{channels, channels},
        normal_init(channels * channels, 2.0 / static_cast<double>(channels),
                    rng));
    l.pointwise_bias = Value::zeros(Shape{channels}, true);
    l.gamma = Value::parameter(Shape{channels},
                               std::vector<double>(channels, 1.0));
    l.beta = Value::zeros(Shape{channels}, true);
    l.bn = BatchNormState::identity(channels);
  }
  return p;
}

Value temporal_conv_block(const Value& x, TemporalConvBlockParams& params,
                          Mode mode) {
  return block_impl(x, params, mode == Mode::kTrain ? &params : nullptr);
}

Value temporal_conv_block(const Value& x,
                          const TemporalConvBlockParams& params) {
  return block_impl(x, params, nullptr);
}

Value txn_stream_input(const FeatureSequence& seq, const TxnStreamConfig& cfg) {
  if (seq.modality != cfg.modality) {
    throw DataError("txn: stream expects modality '" + cfg.modality +
                    "', got '" + seq.modality + "'");
  }
  if (seq.frames == 0) throw DataError("txn: empty sequence");
  if (seq.dim != cfg.feature_dim) {
    throw DataError("txn: modality '" + seq.modality + "' has dim " +
                    std::to_string(seq.dim) + ", expected " +
                    std::to_string(cfg.feature_dim));
  }
  return adaptive_max_pool1d(zero_pad_time(seq.as_value(), cfg.pad_len),
                             cfg.num_segments);
}

Value txn_stream_forward(std::span<const FeatureSequence* const> seqs,
                         const TxnStreamConfig& cfg, TxnStreamParams& params,
                         Mode mode) {
  return stream_impl(seqs, cfg, params,
                     mode == Mode::kTrain ? &params : nullptr);
}

Value txn_stream_forward(const FeatureSequence& seq, const TxnStreamConfig& cfg,
                         TxnStreamParams& params, Mode mode) {
  const FeatureSequence* one[] = {&seq};
  Value out = txn_stream_forward(one, cfg, params, mode);
  return reshape(out, Shape{cfg.channels});
}

TxnNet::TxnNet(TxnConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg)) {
  cfg_.validate();
  Rng rng(seed);
  std::size_t width = 0;
  for (const auto& s : cfg_.streams) {
    streams_.push_back(init_stream(s, rng));
    width += s.channels;
  }
  cls_w_ = Value::parameter(
      Shape{width, cfg_.num_classes},
      normal_init(width * cfg_.num_classes,
                  kClassifierInitScale / static_cast<double>(width), rng));
  cls_b_ = Value::zeros(Shape{cfg_.num_classes}, true);
}

Value TxnNet::forward(std::span<const VideoSample* const> batch, Mode mode) {
  std::vector<Value> feats;
  for (std::size_t i = 0; i < cfg_.streams.size(); ++i) {
    const TxnStreamConfig& sc = cfg_.streams[i];
    std::vector<const FeatureSequence*> seqs;
    seqs.reserve(batch.size());
    for (const VideoSample* s : batch) seqs.push_back(&s->modality(sc.modality));
    feats.push_back(txn_stream_forward(seqs, sc, streams_[i], mode));
  }
  return affine(concat(feats, 1), cls_w_, cls_b_);
}

Value TxnNet::logits(const VideoSample& sample) const {
  std::vector<Value> feats;
  for (std::size_t i = 0; i < cfg_.streams.size(); ++i) {
    const TxnStreamConfig& sc = cfg_.streams[i];
    const FeatureSequence* one[] = {&sample.modality(sc.modality)};
    feats.push_back(
        reshape(stream_impl(one, sc, streams_[i], nullptr), Shape{sc.channels}));
  }
  return affine(concat(feats, 0), cls_w_, cls_b_);
}

std::vector<NamedParam> TxnNet::parameters() const {
  std::vector<NamedParam> out;
  for (std::size_t i = 0; i < streams_.size(); ++i) {
    const std::string s = "txn.stream" + std::to_string(i) + ".";
    const TxnStreamParams& p = streams_[i];
    out.push_back({s + "entry.weight", p.entry_weight});
    out.push_back({s + "entry.bias", p.entry_bias});
    for (std::size_t b = 0; b < p.blocks.size(); ++b) {
      for (std::size_t l = 0; l < 2; ++l) {
        const std::string n = s + "block" + std::to_string(b) + ".layer" +
                              std::to_string(l) + ".";
        const SeparableLayerParams& lp = p.blocks[b].layers[l];
        out.push_back({n + "depthwise", lp.depthwise});
        out.push_back({n + "pointwise.weight", lp.pointwise});
        out.push_back({n + "pointwise.bias", lp.pointwise_bias});
        out.push_back({n + "bn.gamma", lp.gamma});
        out.push_back({n + "bn.beta", lp.beta});
      }
    }
  }
  out.push_back({"txn.classifier.weight", cls_w_});
  out.push_back({"txn.classifier.bias", cls_b_});
  return out;
}

std::vector<NamedBuffer> TxnNet::buffers() {
  std::vector<NamedBuffer> out;
  for (std::size_t i = 0; i < streams_.size(); ++i) {
    for (std::size_t b = 0; b < streams_[i].blocks.size(); ++b) {
      for (std::size_t l = 0; l < 2; ++l) {
        const std::string n = "txn.stream" + std::to_string(i) + ".block" +
                              std::to_string(b) + ".layer" +
                              std::to_string(l) + ".bn.";
        BatchNormState& st = streams_[i].blocks[b].layers[l].bn;
        out.push_back({n + "running_mean", &st.running_mean});
        out.push_back({n + "running_var", &st.running_var});
      }
    }
  }
  return out;
}

void TxnNet::check_compatible(const VideoSample& sample) const {
  std::vector<ModalitySpec> expected;
  for (const auto& s : cfg_.streams) expected.push_back({s.modality, s.feature_dim});
  check_modalities(sample, expected);
}

KeyValues TxnNet::manifest_for(const TxnConfig& cfg) {
  KeyValues kv{{"kind", "txn"},
               {"num_classes", std::to_string(cfg.num_classes)},
               {"streams", std::to_string(cfg.streams.size())}};
  for (std::size_t i = 0; i < cfg.streams.size(); ++i) {
    const auto& s = cfg.streams[i];
    kv.emplace_back("stream." + std::to_string(i),
                    s.modality + "," + std::to_string(s.feature_dim) + "," +
                        std::to_string(s.pad_len) + "," +
                        std::to_string(s.num_segments) + "," +
                        std::to_string(s.kernel_size) + "," +
                        std::to_string(s.channels) + "," +
                        std::to_string(s.num_blocks));
  }
  return kv;
}

TxnConfig TxnNet::config_from(const KeyValues& manifest) {
  TxnConfig cfg;
  cfg.num_classes =
      parse_size(require_key(manifest, "num_classes"), "num_classes");
  const std::size_t n = parse_size(require_key(manifest, "streams"), "streams");
  for (std::size_t i = 0; i < n; ++i) {
    const std::string key = "stream." + std::to_string(i);
    const auto f = split(require_key(manifest, key), ',');
    if (f.size() != 7) {
      throw ConfigError(
          "'" + key +
          "' must be modality,dim,pad_len,segments,kernel,channels,blocks");
    }
    cfg.streams.push_back({f[0], parse_size(f[1], key), parse_size(f[2], key),
                           parse_size(f[3], key), parse_size(f[4], key),
                           parse_size(f[5], key), parse_size(f[6], key)});
  }
  cfg.validate();
  return cfg;
}

}  // namespace vtm
