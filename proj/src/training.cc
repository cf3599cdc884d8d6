// Copyright 2026 The Hieracoustic Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "asc/training.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include "asc/error.h"
#include "asc/logging.h"
#include "asc/rng.h"

namespace asc {

namespace {

// Largest batch pushed through forward_infer at once when scoring.
constexpr size_t kInferChunk = 1024;

int argmax_low(std::span<const float> row) {
  size_t best = 0;
  for (size_t j = 1; j < row.size(); ++j) {
    if (row[j] > row[best]) best = j;
  }
  return static_cast<int>(best);
}

// Labels used as targets for the single softmax head of this stage.
const std::vector<int>& head_labels(Stage stage, const FrameDataset& ds) {
  return stage == Stage::kDnn1 ? ds.high_labels : ds.low_labels;
}

void check_labels_fit(const std::vector<int>& labels, size_t num_classes,
                      const char* what) {
  for (int label : labels) {
    if (label < 0 || static_cast<size_t>(label) >= num_classes) {
      throw DataError(std::string(what) + " label " + std::to_string(label) +
                      " outside the network's " +
                      std::to_string(num_classes) + "-way head");
    }
  }
}

void check_structure(const Network<float>& net, const TrainingPlan& plan,
                     const FrameDataset& train) {
  if (train.num_frames() == 0) throw DataError("empty training set");
  if (train.features.cols() != net.input_dim) {
    throw DataError("feature dimension " +
                    std::to_string(train.features.cols()) +
                    " does not match network input " +
                    std::to_string(net.input_dim));
  }
  if (plan.stage == Stage::kDnn3) {
    if (!net.has_high_head()) {
      throw ConfigError("dnn3 stage requires a network with both heads");
    }
    check_labels_fit(train.low_labels, net.num_low(), "low-level");
    check_labels_fit(train.high_labels, net.num_high(), "high-level");
  } else {
    if (net.has_high_head()) {
      throw ConfigError(std::string(stage_name(plan.stage)) +
                        " stage requires a single-head network");
    }
    check_labels_fit(head_labels(plan.stage, train), net.num_low(),
                     plan.stage == Stage::kDnn1 ? "high-level" : "low-level");
  }
}

}  // namespace

Stage parse_stage(const std::string& name) {
  if (name == "dnn1") return Stage::kDnn1;
  if (name == "dnn2") return Stage::kDnn2;
  if (name == "dnn3") return Stage::kDnn3;
  if (name == "baseline") return Stage::kBaseline;
  throw ConfigError("unknown stage '" + name +
                    "' (expected dnn1, dnn2, dnn3, or baseline)");
}

const char* stage_name(Stage stage) {
  switch (stage) {
    case Stage::kDnn1: return "dnn1";
    case Stage::kDnn2: return "dnn2";
    case Stage::kDnn3: return "dnn3";
    case Stage::kBaseline: return "baseline";
  }
  return "unknown";
}

void TrainingPlan::validate() const {
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning rate must be positive");
  }
  if (momentum < 0.0 || momentum >= 1.0) {
    throw ConfigError("momentum must lie in [0, 1)");
  }
  if (patience < 1) throw ConfigError("patience must be >= 1");
  loss_weights.validate();
}

void save_training_log(const TrainingLog& log, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot open log file for writing: " + path);
  os << "# seed=" << log.seed << "\n";
  os << "epoch,train_loss,val_frame_acc,seconds\n";
  char buf[128];
  for (const auto& e : log.epochs) {
    std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g,%.3f\n", e.epoch,
                  e.train_loss, e.val_frame_acc, e.seconds);
    os << buf;
  }
  if (!os) throw DataError("failed writing log file: " + path);
}

double frame_accuracy(const Network<float>& net, const Mat<float>& features,
                      const std::vector<int>& labels) {
  ASC_CHECK(features.rows() == labels.size(),
            "feature/label count mismatch");
  if (features.rows() == 0) throw DataError("no frames to score");
  check_labels_fit(labels, net.num_low(), "frame");

  size_t correct = 0;
  Mat<float> chunk;
  for (size_t begin = 0; begin < features.rows(); begin += kInferChunk) {
    const size_t n = std::min(kInferChunk, features.rows() - begin);
    chunk.resize(n, features.cols());
    for (size_t r = 0; r < n; ++r) {
      auto src = features.row(begin + r);
      std::copy(src.begin(), src.end(), chunk.row(r).begin());
    }
    const ForwardOutput<float> out = forward_infer(net, chunk);
    for (size_t r = 0; r < n; ++r) {
      if (argmax_low(out.low.row(r)) == labels[begin + r]) ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(features.rows());
}

std::pair<Network<float>, TrainingLog> train_stage(
    Network<float> net, const TrainingPlan& plan, const FrameDataset& train,
    const FrameDataset* validation) {
  plan.validate();
  net.validate();
  check_structure(net, plan, train);
  if (validation && validation->features.cols() != net.input_dim) {
    throw DataError("validation feature dimension does not match network");
  }

  TrainingLog log;
  log.seed = plan.shuffle_seed;
  if (plan.epochs == 0) return {std::move(net), std::move(log)};

  const size_t n_frames = train.num_frames();
  const size_t batch = static_cast<size_t>(plan.batch_size);
  const bool dual = plan.stage == Stage::kDnn3;
  const float alpha = static_cast<float>(plan.loss_weights.alpha);
  const std::vector<int>& labels = head_labels(plan.stage, train);

  Rng rng(plan.shuffle_seed);
  OptimizerState<float> opt =
      make_optimizer(net, static_cast<float>(plan.learning_rate),
                     static_cast<float>(plan.momentum));

  std::vector<size_t> order(n_frames);
  for (size_t i = 0; i < n_frames; ++i) order[i] = i;

  Mat<float> batch_x;
  ForwardCache<float> cache;
  double best_val = -1.0;
  int since_best = 0;

  for (int epoch = 1; epoch <= plan.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    rng.shuffle(order);

    double loss_sum = 0.0;
    for (size_t begin = 0; begin < n_frames; begin += batch) {
      const size_t n = std::min(batch, n_frames - begin);
      batch_x.resize(n, net.input_dim);
      std::vector<int> batch_low(n);
      std::vector<int> batch_high(dual ? n : 0);
      for (size_t r = 0; r < n; ++r) {
        const size_t idx = order[begin + r];
        auto src = train.features.row(idx);
        std::copy(src.begin(), src.end(), batch_x.row(r).begin());
        batch_low[r] = dual ? train.low_labels[idx] : labels[idx];
        if (dual) batch_high[r] = train.high_labels[idx];
      }
      const Mat<float> d_low = one_hot_rows<float>(batch_low, net.num_low());

      forward_train(net, batch_x, rng, &cache);
      Gradients<float> grads;
      if (dual) {
        const Mat<float> d_high =
            one_hot_rows<float>(batch_high, net.num_high());
        loss_sum += static_cast<double>(
            multi_level_loss(cache.out.low, cache.out.high, d_low, d_high,
                             alpha));
        grads = backward(net, cache, d_low, &d_high, alpha);
      } else {
        loss_sum += static_cast<double>(cross_entropy(cache.out.low, d_low));
        grads = backward<float>(net, cache, d_low, nullptr);
      }
      sgd_momentum_step(net, grads, opt);
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = loss_sum / static_cast<double>(n_frames);
    stats.val_frame_acc = std::numeric_limits<double>::quiet_NaN();
    if (validation && validation->num_frames() > 0) {
      stats.val_frame_acc = frame_accuracy(
          net, validation->features, head_labels(plan.stage, *validation));
    }
    stats.seconds = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
    log.epochs.push_back(stats);
    log_debug("stage ", stage_name(plan.stage), " epoch ", epoch, " loss ",
              stats.train_loss, " val ", stats.val_frame_acc);

    if (plan.early_stop && validation && validation->num_frames() > 0) {
      if (stats.val_frame_acc > best_val) {
        best_val = stats.val_frame_acc;
        since_best = 0;
      } else if (++since_best >= plan.patience) {
        log_info("early stop after epoch ", epoch, " (no improvement for ",
                 plan.patience, " epochs)");
        break;
      }
    }
  }
  return {std::move(net), std::move(log)};
}

Network<float> hierarchical_transfer(const Network<float>& dnn1, int num_low,
                                     uint64_t seed) {
  dnn1.validate();
  if (dnn1.has_high_head()) {
    throw ConfigError("transfer source must be a single-head network");
  }
  if (num_low < 2) throw ConfigError("transfer needs at least 2 classes");
  Network<float> net;
  net.input_dim = dnn1.input_dim;
  net.hidden = dnn1.hidden;  // bit-exact copy
  net.dropout_input = dnn1.dropout_input;
  net.dropout_hidden = dnn1.dropout_hidden;
  Rng rng(seed);
  net.low_head = init_layer<float>(net.top_dim(), static_cast<size_t>(num_low),
                                   Activation::kSoftmax, rng);
  net.validate();
  return net;
}

Network<float> attach_high_head(const Network<float>& dnn2, int num_high,
                                uint64_t seed) {
  dnn2.validate();
  if (dnn2.has_high_head()) {
    throw ConfigError("network already has a high head");
  }
  if (num_high < 2) throw ConfigError("high head needs at least 2 classes");
  Network<float> net = dnn2;  // bit-exact copy of every parameter
  Rng rng(seed);
  net.high_head = init_layer<float>(
      net.top_dim(), static_cast<size_t>(num_high), Activation::kSoftmax, rng);
  net.validate();
  return net;
}

CurriculumResult run_curriculum(const CurriculumConfig& cfg,
                                const Taxonomy& taxonomy,
                                const FrameDataset& train,
                                const FrameDataset* validation) {
  namespace fs = std::filesystem;
  if (cfg.out_dir.empty()) throw ConfigError("curriculum needs an output dir");
  fs::create_directories(cfg.out_dir);

  const auto persist = [&](const Network<float>& net, const TrainingLog& log,
                           const char* name) {
    const std::string model_path = (fs::path(cfg.out_dir) / name).string();
    save_model(net, model_path + ".model");
    save_training_log(log, model_path + ".log.csv");
    return model_path + ".model";
  };

  CurriculumResult result;

  TrainingPlan plan = cfg.plan;
  plan.stage = Stage::kDnn1;
  Network<float> dnn1_init = make_network<float>(
      train.features.cols(), cfg.hidden_dims,
      static_cast<size_t>(taxonomy.num_high()), std::nullopt,
      static_cast<float>(cfg.dropout_input),
      static_cast<float>(cfg.dropout_hidden), cfg.init_seed);
  log_info("curriculum: training dnn1 (", taxonomy.num_high(), "-way)");
  std::tie(result.dnn1, result.log1) =
      train_stage(std::move(dnn1_init), plan, train, validation);
  result.dnn1_path = persist(result.dnn1, result.log1, "dnn1");

  plan.stage = Stage::kDnn2;
  Network<float> dnn2_init =
      hierarchical_transfer(result.dnn1, taxonomy.num_low(), cfg.init_seed + 1);
  log_info("curriculum: training dnn2 (", taxonomy.num_low(),
           "-way, transferred hidden layers)");
  std::tie(result.dnn2, result.log2) =
      train_stage(std::move(dnn2_init), plan, train, validation);
  result.dnn2_path = persist(result.dnn2, result.log2, "dnn2");

  plan.stage = Stage::kDnn3;
  Network<float> dnn3_init =
      attach_high_head(result.dnn2, taxonomy.num_high(), cfg.init_seed + 2);
  log_info("curriculum: training dnn3 (dual head, alpha=",
           cfg.plan.loss_weights.alpha, ")");
  std::tie(result.dnn3, result.log3) =
      train_stage(std::move(dnn3_init), plan, train, validation);
  result.dnn3_path = persist(result.dnn3, result.log3, "dnn3");

  return result;
}

}  // namespace asc
