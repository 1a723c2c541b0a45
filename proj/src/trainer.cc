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


#include "vtm/trainer.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <thread>
#include <type_traits>

#include "vtm/checkpoint.h"
#include "vtm/error.h"
#include "vtm/meanpool.h"
#include "vtm/optim.h"
#include "vtm/rng.h"
#include "vtm/satt.h"
#include "vtm/txn.h"

namespace vtm {

namespace {

constexpr std::size_t kMaxThreads = 256;

// Stream indices for derive_seed.
constexpr std::uint64_t kModelStream = 1;
constexpr std::uint64_t kBatchStream = 1000;

struct Field {
  std::string key;
  std::function<void(TrainConfig&, const std::string&)> set;
  std::function<std::string(const TrainConfig&)> get;
};

template <typename T>
Field field(std::string key, T TrainConfig::*member) {
  Field f;
  f.key = key;
  f.set = [key, member](TrainConfig& c, const std::string& v) {
    if constexpr (std::is_same_v<T, double>) {
      c.*member = parse_double(v, key);
    } else if constexpr (std::is_same_v<T, std::string>) {
      c.*member = v;
    } else {
      c.*member = static_cast<T>(parse_u64(v, key));
    }
  };
  f.get = [member](const TrainConfig& c) {
    if constexpr (std::is_same_v<T, double>) {
      return format_double(c.*member);
    } else if constexpr (std::is_same_v<T, std::string>) {
      return c.*member;
    } else {
      return std::to_string(c.*member);
    }
  };
  return f;
}

const std::vector<Field>& fields() {
  static const auto* f = new std::vector<Field>{
      field("model", &TrainConfig::model),
      field("optimizer", &TrainConfig::optimizer),
      field("lr", &TrainConfig::lr),
      field("momentum", &TrainConfig::momentum),
      field("beta1", &TrainConfig::beta1),
      field("beta2", &TrainConfig::beta2),
      field("eps", &TrainConfig::eps),
      field("batch_size", &TrainConfig::batch_size),
      field("epochs", &TrainConfig::epochs),
      field("seed", &TrainConfig::seed),
      field("threads", &TrainConfig::threads),
      field("num_classes", &TrainConfig::num_classes),
      field("satt_heads", &TrainConfig::satt_heads),
      field("satt_alpha", &TrainConfig::satt_alpha),
      field("txn_pad_len", &TrainConfig::txn_pad_len),
      field("txn_segments", &TrainConfig::txn_segments),
      field("txn_kernel", &TrainConfig::txn_kernel),
      field("txn_channels", &TrainConfig::txn_channels),
      field("txn_blocks", &TrainConfig::txn_blocks),
      field("data", &TrainConfig::data),
      field("out", &TrainConfig::out),
  };
  return *f;
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::unique_ptr<Optimizer> make_optimizer(const TrainConfig& cfg,
                                          std::vector<Value> params) {
  if (cfg.optimizer == "adam") {
    return std::make_unique<Adam>(std::move(params),
                                  AdamHyper{cfg.lr, cfg.beta1, cfg.beta2,
                                            cfg.eps});
  }
  return std::make_unique<SgdMomentum>(std::move(params),
                                       SgdMomentumHyper{cfg.lr, cfg.momentum});
}

}  // namespace

void TrainConfig::set(const std::string& key, const std::string& value) {
  for (const Field& f : fields()) {
    if (f.key == key) {
      f.set(*this, value);
      return;
    }
  }
  throw ConfigError("unknown config key '" + key + "'");
}

void TrainConfig::apply(const KeyValues& kv) {
  for (const auto& [k, v] : kv) set(k, v);
}

KeyValues TrainConfig::to_key_values() const {
  KeyValues kv;
  for (const Field& f : fields()) kv.emplace_back(f.key, f.get(*this));
  return kv;
}

std::vector<std::string> TrainConfig::keys() {
  std::vector<std::string> out;
  for (const Field& f : fields()) out.push_back(f.key);
  return out;
}

void TrainConfig::validate() const {
  if (model != "satt" && model != "txn" && model != "meanpool") {
    throw ConfigError("model must be satt, txn or meanpool, got '" + model +
                      "'");
  }
  if (optimizer != "adam" && optimizer != "sgd_momentum") {
    throw ConfigError("optimizer must be adam or sgd_momentum, got '" +
                      optimizer + "'");
  }
  if (!(lr >= 0.0) || !std::isfinite(lr)) {
    throw ConfigError("lr must be finite and >= 0");
  }
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw ConfigError("momentum must be in [0, 1)");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConfigError("beta1 and beta2 must be in [0, 1)");
  }
  if (!(eps > 0.0)) throw ConfigError("eps must be > 0");
  if (batch_size == 0) throw ConfigError("batch_size must be >= 1");
  if (epochs == 0) throw ConfigError("epochs must be >= 1");
  if (threads == 0 || threads > kMaxThreads) {
    throw ConfigError("threads must be in [1, " + std::to_string(kMaxThreads) +
                      "]");
  }
}

std::unique_ptr<Model> build_model(const TrainConfig& cfg,
                                   std::span<const ModalitySpec> modalities,
                                   std::size_t num_classes) {
  const std::uint64_t seed = derive_seed(cfg.seed, kModelStream);
  if (cfg.model == "satt") {
    SattNetConfig c;
    for (const auto& m : modalities) {
      c.groups.push_back({m.name, m.dim, cfg.satt_heads, cfg.satt_alpha});
    }
    c.num_classes = num_classes;
    return std::make_unique<SattNet>(c, seed);
  }
  if (cfg.model == "txn") {
    TxnConfig c;
    for (const auto& m : modalities) {
      c.streams.push_back({m.name, m.dim, cfg.txn_pad_len, cfg.txn_segments,
                           cfg.txn_kernel, cfg.txn_channels, cfg.txn_blocks});
    }
    c.num_classes = num_classes;
    return std::make_unique<TxnNet>(c, seed);
  }
  if (cfg.model == "meanpool") {
    MeanPoolConfig c{{modalities.begin(), modalities.end()}, num_classes};
    return std::make_unique<MeanPoolNet>(c, seed);
  }
  throw ConfigError("unknown model kind '" + cfg.model + "'");
}

std::string format_metrics(const MetricsReport& r) {
  std::string out;
  out += "model: " + r.model + "\n";
  out += "num_classes: " + std::to_string(r.num_classes) + "\n";
  out += "train_videos: " + std::to_string(r.train_videos) + "\n";
  out += "val_videos: " + std::to_string(r.val_videos) + "\n";
  out += "initial_loss: " + format_double(r.initial_loss) + "\n";
  out += "best_epoch: " + std::to_string(r.best_epoch) + "\n";
  out += "top1: " + format_double(r.top1) + "\n";
  out += "top5: " + format_double(r.top5) + "\n";
  if (!r.scores_path.empty()) out += "scores: " + r.scores_path + "\n";
  out += "\nepoch,train_loss,val_top1,val_top5\n";
  for (const EpochMetrics& e : r.epochs) {
    out += std::to_string(e.epoch) + "," + format_double(e.train_loss) + "," +
           format_double(e.val_top1) + "," + format_double(e.val_top5) + "\n";
  }
  return out;
}

std::size_t top5_k(std::size_t num_classes) {
  return std::min<std::size_t>(5, num_classes);
}

ScoreTable score_samples(const Model& model,
                         std::span<const VideoSample> samples,
                         std::size_t threads) {
  std::vector<std::vector<double>> probs(samples.size());
  threads = std::clamp<std::size_t>(threads, 1, kMaxThreads);
  threads = std::min(threads, std::max<std::size_t>(samples.size(), 1));
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      probs[i] = softmax(model.logits(samples[i]).data());
    }
  };
  if (threads == 1) {
    work(0, samples.size());
  } else {
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    const std::size_t chunk = (samples.size() + threads - 1) / threads;
    for (std::size_t w = 0; w < threads; ++w) {
      const std::size_t begin = std::min(samples.size(), w * chunk);
      const std::size_t end = std::min(samples.size(), begin + chunk);
      pool.emplace_back([&, w, begin, end] {
        try {
          work(begin, end);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  ScoreTable table{model.num_classes(), {}};
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!table.rows.emplace(samples[i].id, std::move(probs[i])).second) {
      throw DataError("duplicate video id '" + samples[i].id + "'");
    }
  }
  return table;
}

EvalResult evaluate(const Model& model, std::span<const VideoSample> samples,
                    const std::map<std::string, std::size_t>& labels,
                    std::size_t threads) {
  for (const VideoSample& s : samples) {
    try {
      model.check_compatible(s);
    } catch (const ConfigError& e) {
      throw DataError(e.what());
    }
  }
  EvalResult r;
  r.scores = score_samples(model, samples, threads);
  if (!r.scores.rows.empty()) {
    r.top1 = top_k_accuracy(r.scores, labels, 1);
    r.top5 = top_k_accuracy(r.scores, labels, top5_k(model.num_classes()));
  }
  return r;
}

std::string format_eval_metrics(const EvalResult& result,
                                std::size_t num_classes) {
  std::string out;
  out += "videos: " + std::to_string(result.scores.rows.size()) + "\n";
  out += "num_classes: " + std::to_string(num_classes) + "\n";
  out += "top1: " + format_double(result.top1) + "\n";
  out += "top" + std::to_string(top5_k(num_classes)) + ": " +
         format_double(result.top5) + "\n";
  return out;
}

double mean_loss(const Model& model, std::span<const VideoSample> samples) {
  if (samples.empty()) return 0.0;
  double total = 0.0;
  for (const VideoSample& s : samples) {
    const std::size_t label[] = {s.label};
    total += cross_entropy(model.logits(s), label).item();
  }
  return total / static_cast<double>(samples.size());
}

TrainResult train(const TrainConfig& cfg, std::span<const VideoSample> train,
                  std::span<const VideoSample> val) {
  cfg.validate();
  if (train.empty()) throw DataError("training split is empty");
  if (val.empty()) throw DataError("validation split is empty");
  validate_samples(train);
  validate_samples(val);
  const auto start = std::chrono::steady_clock::now();

  std::size_t num_classes = cfg.num_classes;
  if (num_classes == 0) {
    for (const auto* split : {&train, &val}) {
      for (const VideoSample& s : *split) {
        num_classes = std::max(num_classes, s.label + 1);
      }
    }
  }
  const std::vector<ModalitySpec> modalities = modalities_of(train[0]);
  std::unique_ptr<Model> model = build_model(cfg, modalities, num_classes);
  for (const auto* split : {&train, &val}) {
    for (const VideoSample& s : *split) {
      model->check_compatible(s);
      if (s.label >= num_classes) {
        throw ConfigError("video '" + s.id + "' has label " +
                          std::to_string(s.label) + " but num_classes is " +
                          std::to_string(num_classes));
      }
    }
  }

  std::vector<Value> params;
  for (const NamedParam& p : model->parameters()) params.push_back(p.value);
  std::unique_ptr<Optimizer> opt = make_optimizer(cfg, params);
  const auto val_labels = labels_of(val);

  TrainResult result;
  MetricsReport& report = result.report;
  report.model = cfg.model;
  report.num_classes = num_classes;
  report.train_videos = train.size();
  report.val_videos = val.size();
  report.initial_loss = mean_loss(*model, train);

  double best_top1 = -1.0;
  std::vector<const VideoSample*> batch;
  std::vector<std::size_t> labels;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    BatchIter it(train, cfg.batch_size,
                 derive_seed(cfg.seed, kBatchStream + epoch));
    double loss_sum = 0.0;
    while (it.next(batch)) {
      labels.clear();
      for (const VideoSample* s : batch) labels.push_back(s->label);
      zero_grads(params);
      Value loss = cross_entropy(model->forward(batch, Mode::kTrain), labels);
      backward(loss);
      opt->step();
      loss_sum += loss.item() * static_cast<double>(batch.size());
    }
    EvalResult ev = evaluate(*model, val, val_labels, cfg.threads);
    report.epochs.push_back({epoch,
                             loss_sum / static_cast<double>(train.size()),
                             ev.top1, ev.top5});
    if (ev.top1 > best_top1) {
      best_top1 = ev.top1;
      report.best_epoch = epoch;
      report.top1 = ev.top1;
      report.top5 = ev.top5;
      result.scores = std::move(ev.scores);
      result.best_checkpoint = encode_checkpoint(*model);
    }
  }
  result.best_model = decode_checkpoint(result.best_checkpoint);
  report.wall_seconds = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
  return result;
}

MetricsReport train_to_dir(const TrainConfig& cfg) {
  cfg.validate();
  if (cfg.data.empty()) throw ConfigError("'data' directory is required");
  if (cfg.out.empty()) throw ConfigError("'out' directory is required");
  const std::filesystem::path data(cfg.data);
  const std::filesystem::path out(cfg.out);
  const auto train_set = read_mmf((data / "train.mmf").string());
  const auto val_set = read_mmf((data / "val.mmf").string());
  TrainResult r = train(cfg, train_set, val_set);
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) {
    throw IoError("cannot create '" + out.string() + "': " + ec.message());
  }
  r.report.scores_path = "scores.csv";
  write_file((out / "checkpoint.bin").string(), r.best_checkpoint);
  write_score_table((out / "scores.csv").string(), r.scores);
  write_file((out / "metrics.txt").string(), format_metrics(r.report));
  return r.report;
}

}  // namespace vtm
