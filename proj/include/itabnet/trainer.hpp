// Copyright 2026 The itabnet Authors. All Rights Reserved.
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


#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "itabnet/dataset.hpp"
#include "itabnet/model.hpp"
#include "itabnet/objective.hpp"

namespace itabnet {

enum class Metric { kAccuracy, kAuc };

Metric parse_metric(const std::string& name);
std::string metric_name(Metric m);

struct TrainConfig {
  double learning_rate = 0.02;
  int batch_size = 1024;
  int max_epochs = 200;
  // 0 disables early stopping.
  int early_stop_patience = 15;
  double grad_clip_norm = 5.0;
  double r_m = 0.0;
  double prior_weight = 1.0;
  // Regularizer schedule: warmup_epochs on the classification term alone,
  // then ramp_epochs over which the prior and pairwise weights grow
  // geometrically from ramp_floor times their targets to the full values.
  // Model selection and early stopping only consider later epochs.
  int warmup_epochs = 20;
  int ramp_epochs = 20;
  double ramp_floor = 1e-6;
  std::uint64_t seed = 0;
  PairwiseMode pairwise_mode = PairwiseMode::kAllPairs;
  // Validation metric used for model selection.
  Metric selection_metric = Metric::kAccuracy;

  void validate() const;
};

enum class TrainStatus { kCompleted, kEarlyStopped, kAborted };

std::string train_status_name(TrainStatus s);

struct EpochRecord {
  int epoch = 0;
  LossBreakdown train_loss;  // batch-size weighted mean over the epoch
  double val_metric = 0.0;
  double val_accuracy = 0.0;
  double max_grad_norm = 0.0;  // largest norm applied in an update
};

struct TrainResult {
  Model model;
  std::vector<EpochRecord> history;
  int best_epoch = -1;  // index into history, -1 when empty
  TrainStatus status = TrainStatus::kCompleted;
  std::string abort_reason;
  int last_finite_epoch = -1;
  double max_applied_grad_norm = 0.0;
};

// Multiplier on both regularizer weights after `progress` epochs (fractional
// within an epoch): 0 during warm-up, then geometric from ramp_floor to 1.
double regularizer_scale(const TrainConfig& cfg, double progress);

// Fills n_features, n_classes and categorical_cardinalities from `ds`.
ModelConfig model_config_for(const Dataset& ds, ModelConfig base);

// Adam on the negative ELBO with sampled masks; Gumbel noise and batch order
// are derived from cfg.seed. The returned model is the best by validation
// metric (expected-mode masks). Numeric divergence stops training with
// status kAborted and the best model so far.
TrainResult train(Model model, const Dataset& train_ds, const Dataset& val_ds,
                  const TrainConfig& cfg,
                  const std::function<void(const EpochRecord&)>& on_epoch = {});

struct Prediction {
  Matrix probs;  // N x C
  MaskTensor masks;
  MaskDistributions dists;
};

// Expected-mode forward in row batches.
Prediction predict(const Model& model, const Matrix& X, std::size_t batch_rows = 4096);

double evaluate(const Model& model, const Dataset& ds, Metric metric);
double evaluate(const Prediction& pred, const Dataset& ds, Metric metric);

struct SeedFailure {
  std::uint64_t seed = 0;
  std::string message;
};

struct MultiSeedResult {
  double mean = 0.0;
  double std = 0.0;
  std::vector<std::uint64_t> seeds;  // successful seeds, in input order
  std::vector<double> values;
  std::vector<SeedFailure> failures;
};

// Trains once per seed (model and training seed both set to it) and
// evaluates `metric` on test_ds. Runs are reduced in seed order regardless
// of `threads`.
MultiSeedResult multi_seed_eval(const ModelConfig& model_cfg, const TrainConfig& train_cfg,
                                const Dataset& train_ds, const Dataset& val_ds,
                                const Dataset& test_ds, const std::vector<std::uint64_t>& seeds,
                                Metric metric, int threads = 1);

}  // namespace itabnet
