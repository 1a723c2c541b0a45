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


// vtm: synthetic data generation, training, evaluation, score fusion and
// gradient checking.
//
// Exit codes: 0 success, 2 configuration or usage error, 3 I/O, format or
// data error, 4 gradient check failure.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vtm/checkpoint.h"
#include "vtm/dataset.h"
#include "vtm/error.h"
#include "vtm/gradcheck.h"
#include "vtm/kv_config.h"
#include "vtm/score_table.h"
#include "vtm/synth.h"
#include "vtm/trainer.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitVerify = 4;

using Overrides = std::map<std::string, std::string>;

std::string flag_name(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return "--" + key;
}

// One flag per config key; values given on the command line win over the
// config file.
void add_key_flags(CLI::App* app, const vtm::KeyValues& defaults,
                   Overrides& given) {
  for (const auto& [key, def] : defaults) {
    app->add_option_function<std::string>(
           flag_name(key),
           [&given, key = key](const std::string& v) { given[key] = v; },
           "config key '" + key + "'")
        ->default_str(def);
  }
}

template <typename Config>
Config merge_config(const std::string& config_path, const Overrides& given) {
  Config cfg;
  if (!config_path.empty()) {
    for (const auto& [k, v] : vtm::read_key_values_file(config_path)) {
      cfg.set(k, v);
    }
  }
  for (const auto& [k, v] : given) cfg.set(k, v);
  return cfg;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw vtm::IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw vtm::IoError("write to '" + path + "' failed");
}

std::vector<vtm::VideoSample> read_dataset(const std::string& path) {
  if (std::filesystem::is_directory(path)) {
    return vtm::read_mmf((std::filesystem::path(path) / "val.mmf").string());
  }
  return vtm::read_mmf(path);
}

struct SynthArgs {
  std::string config;
  std::string out;
  Overrides given;
};

int cmd_synthgen(const SynthArgs& a) {
  const auto cfg = merge_config<vtm::SynthConfig>(a.config, a.given);
  const vtm::SynthDataset ds = vtm::synth_generate(cfg);
  const std::filesystem::path out(a.out);
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) throw vtm::IoError("cannot create '" + a.out + "': " + ec.message());
  vtm::write_mmf((out / "train.mmf").string(), ds.train);
  vtm::write_mmf((out / "val.mmf").string(), ds.val);
  std::vector<vtm::VideoSample> all = ds.train;
  all.insert(all.end(), ds.val.begin(), ds.val.end());
  vtm::write_labels((out / "labels.csv").string(), all);
  std::printf("classes: %zu\nmodalities: %s\nframes: %zu\n", cfg.num_classes,
              vtm::format_modalities(cfg.modalities).c_str(), cfg.frames);
  std::printf("train videos: %zu\nval videos: %zu\nwritten to: %s\n",
              ds.train.size(), ds.val.size(), a.out.c_str());
  return kExitOk;
}

struct TrainArgs {
  std::string config;
  Overrides given;
};

int cmd_train(const TrainArgs& a, CLI::App* app) {
  const auto cfg = merge_config<vtm::TrainConfig>(a.config, a.given);
  if (cfg.data.empty() || cfg.out.empty()) {
    std::cerr << "error: --data and --out are required\n\n" << app->help();
    return kExitUsage;
  }
  const vtm::MetricsReport r = vtm::train_to_dir(cfg);
  for (const auto& e : r.epochs) {
    std::printf("epoch %zu  train_loss %.6f  val_top1 %.4f  val_top5 %.4f\n",
                e.epoch, e.train_loss, e.val_top1, e.val_top5);
  }
  std::printf("best epoch %zu: top1 %.4f top5 %.4f (%.2f s)\n", r.best_epoch,
              r.top1, r.top5, r.wall_seconds);
  return kExitOk;
}

struct EvalArgs {
  std::string checkpoint;
  std::string data;
  std::string labels;
  std::string scores_out;
  std::string metrics_out;
  std::size_t threads = 1;
};

int cmd_eval(const EvalArgs& a) {
  const auto model = vtm::load_checkpoint(a.checkpoint);
  const auto samples = read_dataset(a.data);
  const auto labels =
      a.labels.empty() ? vtm::labels_of(samples) : vtm::read_labels(a.labels);
  const vtm::EvalResult r = vtm::evaluate(*model, samples, labels, a.threads);
  const std::string metrics = vtm::format_eval_metrics(r, model->num_classes());
  if (!a.scores_out.empty()) vtm::write_score_table(a.scores_out, r.scores);
  if (!a.metrics_out.empty()) write_text(a.metrics_out, metrics);
  std::cout << metrics;
  return kExitOk;
}

struct FuseArgs {
  std::vector<std::string> scores;
  std::vector<double> weights;
  std::string labels;
  std::string out;
};

int cmd_fuse(const FuseArgs& a) {
  std::vector<vtm::ScoreTable> tables;
  for (const auto& p : a.scores) tables.push_back(vtm::read_score_table(p));
  const vtm::ScoreTable fused = a.weights.empty()
                                    ? vtm::ensemble(tables)
                                    : vtm::late_fuse(tables, a.weights);
  if (a.out.empty()) {
    std::cout << vtm::format_score_table(fused);
  } else {
    vtm::write_score_table(a.out, fused);
  }
  if (!a.labels.empty()) {
    const auto labels = vtm::read_labels(a.labels);
    const std::size_t k5 = vtm::top5_k(fused.num_classes);
    std::printf("videos: %zu\ntop1: %s\ntop%zu: %s\n", fused.rows.size(),
                vtm::format_double(vtm::top_k_accuracy(fused, labels, 1)).c_str(),
                k5,
                vtm::format_double(vtm::top_k_accuracy(fused, labels, k5))
                    .c_str());
  }
  return kExitOk;
}

int cmd_gradcheck(const std::string& op, const vtm::GradcheckOptions& opt) {
  const auto results = vtm::run_gradcheck(op, opt);
  bool ok = true;
  for (const auto& r : results) {
    std::printf("%-22s %s  max_rel_error %.3e  coords %zu  redraws %zu\n",
                r.name.c_str(), r.passed ? "PASS" : "FAIL", r.max_rel_error,
                r.coordinates, r.redraws);
    ok = ok && r.passed;
  }
  std::printf("%s (tol %g, step %g, %zu seeds)\n", ok ? "PASS" : "FAIL",
              opt.tol, opt.step, opt.num_seeds);
  return ok ? kExitOk : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multimodal video classification toolkit", "vtm"};
  app.require_subcommand(1);

  SynthArgs synth;
  CLI::App* synth_cmd =
      app.add_subcommand("synthgen", "Generate the planted-signal dataset");
  synth_cmd->add_option("--out", synth.out, "Output directory")->required();
  synth_cmd->add_option("--config", synth.config, "key = value config file");
  add_key_flags(synth_cmd, vtm::SynthConfig{}.to_key_values(), synth.given);

  TrainArgs train;
  CLI::App* train_cmd = app.add_subcommand("train", "Train a model");
  train_cmd->add_option("--config", train.config, "key = value config file");
  add_key_flags(train_cmd, vtm::TrainConfig{}.to_key_values(), train.given);

  EvalArgs eval;
  CLI::App* eval_cmd =
      app.add_subcommand("eval", "Evaluate a checkpoint on a dataset");
  eval_cmd->add_option("--checkpoint", eval.checkpoint, "Checkpoint file")
      ->required();
  eval_cmd
      ->add_option("--data", eval.data,
                   "MMF1 file, or a directory containing val.mmf")
      ->required();
  eval_cmd->add_option("--labels", eval.labels,
                       "video_id,label file (default: labels stored in data)");
  eval_cmd->add_option("--scores-out", eval.scores_out, "Score table output");
  eval_cmd->add_option("--metrics-out", eval.metrics_out, "Metrics output");
  eval_cmd->add_option("--threads", eval.threads, "Inference threads")
      ->capture_default_str();

  FuseArgs fuse;
  CLI::App* fuse_cmd = app.add_subcommand("fuse", "Fuse score tables");
  fuse_cmd->add_option("--scores", fuse.scores, "Score table files")
      ->required();
  fuse_cmd->add_option("--weights", fuse.weights,
                       "One weight per table, summing to 1 (default: equal)");
  fuse_cmd->add_option("--labels", fuse.labels, "video_id,label file");
  fuse_cmd->add_option("--out", fuse.out,
                       "Fused score table output (default: stdout)");

  std::string op = "all";
  vtm::GradcheckOptions gc;
  CLI::App* gc_cmd = app.add_subcommand(
      "gradcheck", "Compare analytic gradients with finite differences");
  gc_cmd->add_option("--op", op, "Check name or 'all'")->capture_default_str();
  gc_cmd->add_option("--seed", gc.seed, "Base seed")->capture_default_str();
  gc_cmd->add_option("--seeds", gc.num_seeds, "Seeds per check")
      ->capture_default_str();
  gc_cmd->add_option("--tol", gc.tol, "Max relative error")
      ->capture_default_str();
  gc_cmd->add_option("--step", gc.step, "Finite-difference step")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*synth_cmd) return cmd_synthgen(synth);
    if (*train_cmd) return cmd_train(train, train_cmd);
    if (*eval_cmd) return cmd_eval(eval);
    if (*fuse_cmd) return cmd_fuse(fuse);
    if (*gc_cmd) return cmd_gradcheck(op, gc);
  } catch (const vtm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const vtm::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const vtm::ShapeError& e) {
    std::cerr << "shape error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const vtm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
