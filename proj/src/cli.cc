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

#include "asc/cli.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <optional>

#include "CLI11.hpp"
#include "asc/config.h"
#include "asc/dataset.h"
#include "asc/decision.h"
#include "asc/error.h"
#include "asc/evaluation.h"
#include "asc/features.h"
#include "asc/logging.h"
#include "asc/network.h"
#include "asc/synthetic.h"
#include "asc/taxonomy.h"
#include "asc/training.h"
#include "asc/wav.h"

namespace asc::cli {

namespace {

namespace fs = std::filesystem;

Taxonomy resolve_taxonomy(const std::string& path) {
  return path.empty() ? Taxonomy::dcase2016() : Taxonomy::from_csv(path);
}

WindowKind parse_window(const std::string& name) {
  if (name == "hamming") return WindowKind::kHamming;
  if (name == "hann") return WindowKind::kHann;
  if (name == "rect") return WindowKind::kRectangular;
  throw ConfigError("unknown window '" + name +
                    "' (expected hamming, hann, or rect)");
}

// ---------------------------------------------------------------------------
// features

struct FeaturesOpts {
  std::string manifest;
  std::string out;
  int fold = 0;  // 0: stats over every segment
  int context = 11;
  int mel = 40;
  int frame_length = 640;
  int hop = 320;
  int fft = 1024;
  std::string window = "hamming";
  double fmin = 0.0;
  double fmax = 8000.0;
};

int cmd_features(const FeaturesOpts& opts) {
  FramingConfig framing;
  framing.frame_length_samples = opts.frame_length;
  framing.hop_samples = opts.hop;
  framing.fft_size = opts.fft;
  framing.window = parse_window(opts.window);
  framing.validate();
  const MelFilterBank fb =
      build_mel_filterbank(framing, opts.mel, opts.fmin, opts.fmax);

  const std::vector<SegmentRecord> records = load_manifest(opts.manifest);
  fs::create_directories(opts.out);

  std::vector<SegmentRecord> extracted;
  size_t failures = 0;
  for (const auto& rec : records) {
    SegmentRecord out_rec = rec;
    out_rec.path = (fs::path(opts.out) / (rec.segment_id + ".feat")).string();
    try {
      const PcmSignal signal = load_wav(rec.path);
      const MelFeatureSequence feats = extract_log_mel(signal, framing, fb);
      write_feature_file(out_rec.path, feats.frames);
      extracted.push_back(std::move(out_rec));
    } catch (const std::exception& e) {
      log_error(rec.path, ": ", e.what());
      ++failures;
    }
  }
  if (extracted.empty()) {
    throw DataError("feature extraction failed for every segment");
  }
  save_manifest(extracted,
                (fs::path(opts.out) / "features_manifest.csv").string());

  std::vector<SegmentRecord> train_subset;
  for (const auto& rec : extracted) {
    if (opts.fold < 1 || rec.fold != opts.fold) train_subset.push_back(rec);
  }
  if (!train_subset.empty()) {
    const NormStats stats =
        compute_stats_for_records(train_subset, opts.context);
    const std::string stats_name =
        opts.fold >= 1 ? "stats_fold" + std::to_string(opts.fold) + ".stats"
                       : "stats_all.stats";
    write_norm_stats((fs::path(opts.out) / stats_name).string(), stats);
  }

  if (failures > 0) {
    throw DataError(std::to_string(failures) + " of " +
                    std::to_string(records.size()) + " segments failed");
  }
  log_info("extracted features for ", extracted.size(), " segments");
  return 0;
}

// ---------------------------------------------------------------------------
// train

Network<float> init_for_stage(const RunConfig& cfg, const Taxonomy& taxonomy,
                              size_t input_dim) {
  const Stage stage = parse_stage(cfg.stage);
  const float rho_in = static_cast<float>(cfg.dropout_input);
  const float rho_h = static_cast<float>(cfg.dropout_hidden);
  switch (stage) {
    case Stage::kDnn1:
      if (!cfg.init_model.empty()) return load_model(cfg.init_model);
      return make_network<float>(input_dim, cfg.hidden,
                                 static_cast<size_t>(taxonomy.num_high()),
                                 std::nullopt, rho_in, rho_h, cfg.seed);
    case Stage::kDnn2:
      // Warm start: hidden layers from the coarse-task model, fresh head.
      return hierarchical_transfer(load_model(cfg.init_model),
                                   taxonomy.num_low(), cfg.seed + 1);
    case Stage::kDnn3:
      return attach_high_head(load_model(cfg.init_model), taxonomy.num_high(),
                              cfg.seed + 2);
    case Stage::kBaseline:
      if (!cfg.init_model.empty()) return load_model(cfg.init_model);
      return make_network<float>(input_dim, cfg.hidden,
                                 static_cast<size_t>(taxonomy.num_low()),
                                 std::nullopt, rho_in, rho_h, cfg.seed);
  }
  throw ConfigError("unknown stage");
}

int cmd_train(const RunConfig& cfg) {
  cfg.validate();
  const Taxonomy taxonomy = resolve_taxonomy(cfg.taxonomy);
  const std::vector<SegmentRecord> records = load_manifest(cfg.manifest);

  std::vector<SegmentRecord> train_records;
  std::vector<SegmentRecord> val_records;
  if (cfg.fold >= 1) {
    FoldSpec fold = make_fold(records, cfg.fold);
    train_records = std::move(fold.train);
    val_records = std::move(fold.test);
  } else {
    train_records = records;
  }

  // Training-side statistics only; quantized so a reload of the sidecar
  // reproduces the exact normalization.
  NormStats stats =
      cfg.stats.empty()
          ? compute_stats_for_records(train_records, cfg.context).quantized()
          : read_norm_stats(cfg.stats);

  const FrameDataset train_ds =
      assemble_frame_dataset(train_records, taxonomy, stats, cfg.context);
  std::optional<FrameDataset> val_ds;
  if (!val_records.empty()) {
    val_ds = assemble_frame_dataset(val_records, taxonomy, stats, cfg.context);
  }

  TrainingPlan plan;
  plan.stage = parse_stage(cfg.stage);
  plan.epochs = cfg.epochs;
  plan.batch_size = cfg.batch_size;
  plan.learning_rate = cfg.lr;
  plan.momentum = cfg.momentum;
  plan.loss_weights.alpha = cfg.alpha;
  plan.shuffle_seed = cfg.seed;
  plan.early_stop = cfg.early_stop;

  Network<float> net = init_for_stage(cfg, taxonomy, train_ds.features.cols());
  if (plan.stage == Stage::kDnn1 || plan.stage == Stage::kBaseline) {
    net.dropout_input = static_cast<float>(cfg.dropout_input);
    net.dropout_hidden = static_cast<float>(cfg.dropout_hidden);
  }

  log_info("training stage ", cfg.stage, " on ", train_ds.num_frames(),
           " frames (", train_records.size(), " segments), fold ", cfg.fold);
  auto [trained, log] =
      train_stage(std::move(net), plan, train_ds,
                  val_ds ? &*val_ds : nullptr);

  if (const fs::path parent = fs::path(cfg.out).parent_path();
      !parent.empty()) {
    fs::create_directories(parent);
  }
  save_model(trained, cfg.out);
  save_training_log(log, cfg.out + ".log.csv");
  write_norm_stats(cfg.out + ".stats", stats);
  save_run_manifest(cfg, cfg.out + ".run.txt");
  if (!log.epochs.empty()) {
    log_info("final epoch: loss ", log.epochs.back().train_loss,
             ", validation frame accuracy ", log.epochs.back().val_frame_acc);
  }
  log_info("model written to ", cfg.out);
  return 0;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateOpts {
  std::string manifest;
  std::string taxonomy;
  std::vector<std::string> models;
  std::vector<int> folds;
  std::vector<std::string> stats;
  std::string out;
  int context = 11;
};

int cmd_evaluate(const EvaluateOpts& opts) {
  const Taxonomy taxonomy = resolve_taxonomy(opts.taxonomy);
  const std::vector<SegmentRecord> records = load_manifest(opts.manifest);

  std::vector<int> folds = opts.folds;
  if (folds.empty()) folds = fold_ids(records);
  if (folds.empty()) {
    throw DataError("manifest has no fold assignments; pass --fold");
  }
  if (opts.models.size() != 1 && opts.models.size() != folds.size()) {
    throw ConfigError("pass one model, or exactly one per fold");
  }
  if (!opts.stats.empty() && opts.stats.size() != 1 &&
      opts.stats.size() != folds.size()) {
    throw ConfigError("pass one stats file, or exactly one per fold");
  }
  fs::create_directories(opts.out);

  std::vector<FoldReport> reports;
  for (size_t i = 0; i < folds.size(); ++i) {
    const std::string& model_path =
        opts.models[opts.models.size() == 1 ? 0 : i];
    const std::string stats_path =
        opts.stats.empty() ? model_path + ".stats"
                           : opts.stats[opts.stats.size() == 1 ? 0 : i];
    const Network<float> net = load_model(model_path);
    const NormStats stats = read_norm_stats(stats_path);
    const FoldSpec fold = make_fold(records, folds[i]);
    FoldReport report =
        evaluate_fold(net, fold, taxonomy, stats, opts.context);
    write_predictions_csv(
        report, taxonomy,
        (fs::path(opts.out) /
         ("predictions_fold" + std::to_string(folds[i]) + ".csv"))
            .string());
    std::printf("fold %d accuracy %.2f\n", folds[i],
                100.0 * report.segment_accuracy);
    reports.push_back(std::move(report));
  }

  const EvaluationReport report = aggregate_cv(std::move(reports));
  write_report_text(report, taxonomy,
                    (fs::path(opts.out) / "report.txt").string());
  write_fold_csv(report, (fs::path(opts.out) / "folds.csv").string());
  write_confusion_csv(report.pooled, taxonomy,
                      (fs::path(opts.out) / "confusion.csv").string());
  std::printf("average accuracy %.2f\n", 100.0 * report.average_accuracy);
  return 0;
}

// ---------------------------------------------------------------------------
// predict

struct PredictOpts {
  std::string model;
  std::string input;
  std::string stats;
  std::string taxonomy;
  int context = 11;
  int mel = 40;
};

int cmd_predict(const PredictOpts& opts) {
  const Network<float> net = load_model(opts.model);
  const NormStats stats = read_norm_stats(
      opts.stats.empty() ? opts.model + ".stats" : opts.stats);
  const Taxonomy taxonomy = resolve_taxonomy(opts.taxonomy);

  Mat<float> raw;
  if (opts.input.size() >= 4 &&
      opts.input.substr(opts.input.size() - 4) == ".wav") {
    const FramingConfig framing;
    const MelFilterBank fb =
        build_mel_filterbank(framing, opts.mel, 0.0, 8000.0);
    raw = extract_log_mel(load_wav(opts.input), framing, fb).frames;
  } else {
    raw = read_feature_file(opts.input);
  }
  Mat<float> frames = stack_context(raw, opts.context);
  if (frames.cols() != net.input_dim) {
    throw DataError("stacked feature dimension " +
                    std::to_string(frames.cols()) +
                    " does not match model input " +
                    std::to_string(net.input_dim));
  }
  normalize_inplace(frames, stats);

  const ForwardOutput<float> out = forward_infer(net, frames);
  const SegmentDecision decision =
      classify_segment(make_segment_posteriors(out.low));

  std::string label;
  if (static_cast<int>(net.num_low()) == taxonomy.num_low()) {
    label = taxonomy.low_name(decision.class_index);
  } else if (static_cast<int>(net.num_low()) == taxonomy.num_high()) {
    label = taxonomy.high_name(decision.class_index);
  } else {
    label = "C" + std::to_string(decision.class_index + 1);
  }
  std::printf("%s\t%.6f\t%.6f\n", label.c_str(), decision.confidence,
              decision.margin);
  return 0;
}

// ---------------------------------------------------------------------------
// synth

struct SynthOpts {
  std::string out;
  std::string taxonomy;
  uint64_t seed = 0;
  int segments_per_class = 20;
  int frames_per_segment = 100;
  int folds = 4;
  int feature_dim = 40;
  double noise = 1.0;
  double separation = 6.0;
  bool wav = false;
};

int cmd_synth(const SynthOpts& opts) {
  const Taxonomy taxonomy = resolve_taxonomy(opts.taxonomy);
  SyntheticCorpusConfig cfg;
  cfg.seed = opts.seed;
  cfg.segments_per_class = opts.segments_per_class;
  cfg.frames_per_segment = opts.frames_per_segment;
  cfg.num_folds = opts.folds;
  cfg.feature_dim = opts.feature_dim;
  cfg.noise_stddev = opts.noise;
  cfg.separation = opts.separation;
  cfg.write_wav = opts.wav;
  cfg.out_dir = opts.out;
  const SyntheticCorpus corpus = generate_synthetic_corpus(cfg, taxonomy);
  std::printf("seed=%llu\nmanifest=%s\n",
              static_cast<unsigned long long>(cfg.seed),
              corpus.manifest_path.c_str());
  return 0;
}

// Pulls `--config <path>` / `--config=<path>` out of a train invocation so
// the file can preload the defaults before CLI11 binds the remaining flags
// (flags win over the file).
std::string find_config_arg(const std::vector<std::string>& args) {
  for (size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) {
      return args[i].substr(std::string("--config=").size());
    }
  }
  return "";
}

}  // namespace

int run(const std::vector<std::string>& args) {
  try {
    CLI::App app{"hierarchically pre-trained acoustic scene classifier"};
    app.name("hieracoustic");
    app.require_subcommand(1);

    FeaturesOpts fopts;
    CLI::App* feat = app.add_subcommand(
        "features", "Extract log-mel feature files from a WAV manifest");
    feat->add_option("--manifest", fopts.manifest, "WAV manifest CSV")
        ->required();
    feat->add_option("--out", fopts.out, "Output directory")->required();
    feat->add_option("--fold", fopts.fold,
                     "Fold whose training subset feeds the stats file");
    feat->add_option("--context", fopts.context, "Stacking width for stats");
    feat->add_option("--mel", fopts.mel, "Number of mel filters");
    feat->add_option("--frame-length", fopts.frame_length,
                     "Frame length in samples");
    feat->add_option("--hop", fopts.hop, "Hop in samples");
    feat->add_option("--fft", fopts.fft, "FFT size (power of two)");
    feat->add_option("--window", fopts.window, "hamming, hann, or rect");
    feat->add_option("--fmin", fopts.fmin, "Filterbank low edge (Hz)");
    feat->add_option("--fmax", fopts.fmax, "Filterbank high edge (Hz)");

    RunConfig tcfg;
    if (!args.empty() && args[0] == "train") {
      const std::string config_path = find_config_arg(args);
      if (!config_path.empty()) tcfg = load_config_file(config_path);
    }
    std::string config_arg;
    CLI::App* train = app.add_subcommand(
        "train", "Train one curriculum stage on extracted features");
    train->add_option("--config", config_arg,
                      "key=value config file (flags win)");
    train->add_option("--manifest", tcfg.manifest, "Feature manifest CSV");
    train->add_option("--taxonomy", tcfg.taxonomy, "Taxonomy CSV");
    train->add_option("--fold", tcfg.fold, "Held-out fold (0 = none)");
    train->add_option("--stage", tcfg.stage, "dnn1, dnn2, dnn3, or baseline");
    train->add_option("--epochs", tcfg.epochs, "Training epochs");
    train->add_option("--batch-size", tcfg.batch_size, "Mini-batch size");
    train->add_option("--lr", tcfg.lr, "Learning rate");
    train->add_option("--momentum", tcfg.momentum, "Momentum coefficient");
    train->add_option("--alpha", tcfg.alpha, "Dual-objective mixing weight");
    train->add_option("--dropout-input", tcfg.dropout_input,
                      "Input dropout rate");
    train->add_option("--dropout-hidden", tcfg.dropout_hidden,
                      "Hidden dropout rate");
    train->add_option("--seed", tcfg.seed, "Run seed");
    train->add_option("--init-model", tcfg.init_model,
                      "Source model for dnn2/dnn3 (or resume)");
    train->add_option("--out", tcfg.out, "Output model path");
    train->add_option("--context", tcfg.context, "Stacking width");
    train->add_option("--hidden", tcfg.hidden, "Hidden layer sizes")
        ->delimiter(',');
    train->add_flag("--early-stop", tcfg.early_stop,
                    "Stop when validation accuracy plateaus");
    train->add_option("--stats", tcfg.stats, "Normalization stats file");

    EvaluateOpts eopts;
    CLI::App* eval = app.add_subcommand(
        "evaluate", "Cross-validation report over one or more folds");
    eval->add_option("--manifest", eopts.manifest, "Feature manifest CSV")
        ->required();
    eval->add_option("--taxonomy", eopts.taxonomy, "Taxonomy CSV");
    eval->add_option("--model", eopts.models, "Model file (repeatable)")
        ->required();
    eval->add_option("--fold", eopts.folds, "Fold ids (default: all)");
    eval->add_option("--stats", eopts.stats,
                     "Stats file(s); default <model>.stats");
    eval->add_option("--out", eopts.out, "Report directory")->required();
    eval->add_option("--context", eopts.context, "Stacking width");

    PredictOpts popts;
    CLI::App* predict = app.add_subcommand(
        "predict", "Classify one segment (WAV or feature file)");
    predict->add_option("--model", popts.model, "Model file")->required();
    predict->add_option("input", popts.input, "WAV or feature file")
        ->required();
    predict->add_option("--stats", popts.stats,
                        "Stats file; default <model>.stats");
    predict->add_option("--taxonomy", popts.taxonomy, "Taxonomy CSV");
    predict->add_option("--context", popts.context, "Stacking width");
    predict->add_option("--mel", popts.mel, "Mel filters for WAV input");

    SynthOpts sopts;
    CLI::App* synth = app.add_subcommand(
        "synth", "Generate the deterministic synthetic corpus");
    synth->add_option("--out", sopts.out, "Corpus directory")->required();
    synth->add_option("--taxonomy", sopts.taxonomy, "Taxonomy CSV");
    synth->add_option("--seed", sopts.seed, "Corpus seed");
    synth->add_option("--segments-per-class", sopts.segments_per_class,
                      "Segments per scene class");
    synth->add_option("--frames-per-segment", sopts.frames_per_segment,
                      "Frames per segment");
    synth->add_option("--folds", sopts.folds, "Number of folds");
    synth->add_option("--feature-dim", sopts.feature_dim,
                      "Feature dimensionality");
    synth->add_option("--noise", sopts.noise, "Within-class noise stddev");
    synth->add_option("--separation", sopts.separation,
                      "Super-cluster separation");
    synth->add_flag("--wav", sopts.wav, "Write sinusoid WAVs instead");

    int rc = 0;
    feat->callback([&] { rc = cmd_features(fopts); });
    train->callback([&] { rc = cmd_train(tcfg); });
    eval->callback([&] { rc = cmd_evaluate(eopts); });
    predict->callback([&] { rc = cmd_predict(popts); });
    synth->callback([&] { rc = cmd_synth(sopts); });

    try {
      std::vector<std::string> reversed(args.rbegin(), args.rend());
      app.parse(reversed);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e);
      return code == 0 ? 0 : 1;
    }
    return rc;
  } catch (const ConfigError& e) {
    log_error(e.what());
    return 1;
  } catch (const DataError& e) {
    log_error(e.what());
    return 2;
  } catch (const std::exception& e) {
    log_error("internal error: ", e.what());
    return 3;
  }
}

}  // namespace asc::cli
