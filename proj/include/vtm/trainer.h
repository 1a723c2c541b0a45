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


// Training and evaluation loops, metrics reports and run configuration.

#ifndef VTM_TRAINER_H_
#define VTM_TRAINER_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "vtm/dataset.h"
#include "vtm/kv_config.h"
#include "vtm/model.h"
#include "vtm/score_table.h"

namespace vtm {

struct TrainConfig {
  std::string model = "satt";         // satt | txn | meanpool
  std::string optimizer = "adam";     // adam | sgd_momentum
  double lr = 1e-3;
  double momentum = 0.9;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::size_t batch_size = 32;
  std::size_t epochs = 30;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  // 0 means one more than the largest label in the data.
  std::size_t num_classes = 0;

  std::size_t satt_heads = 4;
  double satt_alpha = 1.0;

  std::size_t txn_pad_len = 64;
  std::size_t txn_segments = 16;
  std::size_t txn_kernel = 3;
  std::size_t txn_channels = 64;
  std::size_t txn_blocks = 1;

  // Directory holding train.mmf and val.mmf, and the output directory.
  std::string data;
  std::string out;

  /// Sets one key from text. Throws ConfigError naming the key when it is
  /// unknown or its value does not parse.
  void set(const std::string& key, const std::string& value);
  void apply(const KeyValues& kv);
  KeyValues to_key_values() const;
  static std::vector<std::string> keys();

  /// Throws ConfigError on an invalid value.
  void validate() const;
};

/// Builds the configured architecture for data with these modalities.
std::unique_ptr<Model> build_model(const TrainConfig& cfg,
                                   std::span<const ModalitySpec> modalities,
                                   std::size_t num_classes);

struct EpochMetrics {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_top1 = 0.0;
  double val_top5 = 0.0;
};

struct MetricsReport {
  std::string model;
  std::size_t num_classes = 0;
  std::size_t train_videos = 0;
  std::size_t val_videos = 0;
  double initial_loss = 0.0;
  std::vector<EpochMetrics> epochs;
  std::size_t best_epoch = 0;
  double top1 = 0.0;
  double top5 = 0.0;
  double wall_seconds = 0.0;
  std::string scores_path;
};

/// key: value lines followed by an `epoch,train_loss,val_top1,val_top5` CSV
/// block. Wall-clock time is left out so that identical runs produce
/// identical files.
std::string format_metrics(const MetricsReport& report);

struct EvalResult {
  ScoreTable scores;
  double top1 = 0.0;
  double top5 = 0.0;
};

/// Top-5 uses k = min(5, K).
std::size_t top5_k(std::size_t num_classes);

/// Softmax scores of every sample in infer mode. Work is split across
/// `threads` workers; the table does not depend on the thread count.
ScoreTable score_samples(const Model& model,
                         std::span<const VideoSample> samples,
                         std::size_t threads);

/// Throws DataError when a sample lacks a modality of the model or has a
/// different feature dimension.
EvalResult evaluate(const Model& model, std::span<const VideoSample> samples,
                    const std::map<std::string, std::size_t>& labels,
                    std::size_t threads);

std::string format_eval_metrics(const EvalResult& result,
                                std::size_t num_classes);

/// Mean cross-entropy of the model over the samples in infer mode.
double mean_loss(const Model& model, std::span<const VideoSample> samples);

struct TrainResult {
  MetricsReport report;
  ScoreTable scores;                 // val scores of the best checkpoint
  std::unique_ptr<Model> best_model;
  std::string best_checkpoint;       // encoded checkpoint bytes
};

/// In-memory training. Per epoch: shuffled batches, train-mode forward,
/// cross-entropy, backward, optimizer step, then a val evaluation. The
/// reported metrics and scores come from the epoch with the best val top-1
/// (earliest on ties).
TrainResult train(const TrainConfig& cfg, std::span<const VideoSample> train,
                  std::span<const VideoSample> val);

/// Reads cfg.data/{train,val}.mmf and writes checkpoint.bin, metrics.txt and
/// scores.csv under cfg.out.
MetricsReport train_to_dir(const TrainConfig& cfg);

}  // namespace vtm

#endif  // VTM_TRAINER_H_
