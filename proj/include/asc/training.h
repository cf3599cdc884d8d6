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

#ifndef ASC_TRAINING_H_
#define ASC_TRAINING_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "asc/dataset.h"
#include "asc/network.h"
#include "asc/taxonomy.h"

// Three-stage curriculum. DNN1 is a 3-way network trained on the coarse
// classes; its hidden layers warm-start DNN2 (15-way); DNN3 adds the
// auxiliary coarse head on top of DNN2 and fine-tunes with the weighted
// dual objective. A baseline stage trains the 15-way network from random
// init with no transfer.

namespace asc {

enum class Stage { kDnn1, kDnn2, kDnn3, kBaseline };

/// Parses "dnn1", "dnn2", "dnn3", or "baseline". Throws ConfigError.
Stage parse_stage(const std::string& name);
const char* stage_name(Stage stage);

struct TrainingPlan {
  Stage stage = Stage::kDnn2;
  int epochs = 30;
  int batch_size = 128;
  double learning_rate = 0.005;
  double momentum = 0.9;
  LossWeights loss_weights;  // used by the DNN3 stage only
  uint64_t shuffle_seed = 0;
  bool early_stop = false;  // stop after `patience` epochs without a new
  int patience = 5;         // best validation frame accuracy

  void validate() const;  // throws ConfigError
};

struct EpochStats {
  int epoch = 0;               // 1-based
  double train_loss = 0.0;     // mean per-frame loss over the epoch
  double val_frame_acc = 0.0;  // fraction; NaN when no validation set given
  double seconds = 0.0;
};

struct TrainingLog {
  uint64_t seed = 0;
  std::vector<EpochStats> epochs;  // one entry per completed epoch
};

/// CSV with columns epoch,train_loss,val_frame_acc,seconds after a
/// `# seed=N` comment line. The three leading columns are deterministic for
/// a fixed seed; seconds is wall-clock and is not.
void save_training_log(const TrainingLog& log, const std::string& path);

/// Fraction of feature rows whose low-head argmax (lowest index on ties)
/// equals the label.
double frame_accuracy(const Network<float>& net, const Mat<float>& features,
                      const std::vector<int>& labels);

/// Runs `plan.epochs` passes of shuffled mini-batch SGD on `net`. The stage
/// selects the targets: DNN1 trains its 3-way head against the high-level
/// labels, DNN2/baseline the 15-way head against the low-level labels, DNN3
/// both heads via the weighted dual objective. One seeded generator drives
/// the shuffle and the dropout masks, so a (seed, data, plan) triple pins
/// the whole trajectory. A zero-epoch plan returns the network unchanged
/// with an empty log.
std::pair<Network<float>, TrainingLog> train_stage(
    Network<float> net, const TrainingPlan& plan, const FrameDataset& train,
    const FrameDataset* validation);

/// DNN2 initialization: hidden layers copied from `dnn1` bit-exactly, fresh
/// softmax head over `num_low` classes, no auxiliary head.
Network<float> hierarchical_transfer(const Network<float>& dnn1, int num_low,
                                     uint64_t seed);

/// DNN3 initialization: every `dnn2` parameter copied bit-exactly plus a
/// fresh `num_high`-way softmax head on the top hidden layer. Throws
/// ConfigError when a high head is already present.
Network<float> attach_high_head(const Network<float>& dnn2, int num_high,
                                uint64_t seed);

struct CurriculumConfig {
  TrainingPlan plan;  // stage field ignored; epochs/lr/... shared by stages
  std::vector<size_t> hidden_dims = {500, 500};
  double dropout_input = 0.1;
  double dropout_hidden = 0.3;
  uint64_t init_seed = 0;
  std::string out_dir;  // models and logs land here
};

struct CurriculumResult {
  Network<float> dnn1, dnn2, dnn3;
  TrainingLog log1, log2, log3;
  std::string dnn1_path, dnn2_path, dnn3_path;
};

/// End-to-end curriculum: train DNN1, transfer, train DNN2, attach the high
/// head, train DNN3. Persists the three models (dnn1.model etc.) and their
/// logs under cfg.out_dir.
CurriculumResult run_curriculum(const CurriculumConfig& cfg,
                                const Taxonomy& taxonomy,
                                const FrameDataset& train,
                                const FrameDataset* validation);

}  // namespace asc

#endif  // ASC_TRAINING_H_
