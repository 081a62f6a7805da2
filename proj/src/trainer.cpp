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


#include "itabnet/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

#include "itabnet/errors.hpp"
#include "itabnet/metrics.hpp"
#include "itabnet/optimizer.hpp"

namespace itabnet {
namespace {

std::uint64_t Mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t BatchNoiseSeed(std::uint64_t seed, int epoch, std::size_t batch) {
  return Mix(Mix(seed ^ 0x6e6f697365ull) + static_cast<std::uint64_t>(epoch) * 0x100000001ull +
             batch);
}

void CheckCompatible(const Model& model, const Dataset& ds, const char* which) {
  const auto& cfg = model.config();
  if (ds.n_features() != static_cast<std::size_t>(cfg.n_features)) {
    throw ShapeError(std::string(which) + " set has " + std::to_string(ds.n_features()) +
                     " features, model expects " + std::to_string(cfg.n_features));
  }
  if (ds.n_classes() > cfg.n_classes) {
    throw ShapeError(std::string(which) + " set has more classes than the model");
  }
}

void AddScaled(LossBreakdown& acc, const LossBreakdown& b, double w) {
  acc.nll += w * b.nll;
  acc.prior_kl += w * b.prior_kl;
  acc.pairwise_kl += w * b.pairwise_kl;
  acc.total += w * b.total;
}

}  // namespace

Metric parse_metric(const std::string& name) {
  if (name == "accuracy") return Metric::kAccuracy;
  if (name == "auc") return Metric::kAuc;
  throw ConfigError("unknown metric '" + name + "' (expected accuracy or auc)");
}

std::string metric_name(Metric m) { return m == Metric::kAccuracy ? "accuracy" : "auc"; }

std::string train_status_name(TrainStatus s) {
  switch (s) {
    case TrainStatus::kCompleted:
      return "completed";
    case TrainStatus::kEarlyStopped:
      return "early_stopped";
    case TrainStatus::kAborted:
      return "aborted";
  }
  return "unknown";
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
  if (max_epochs < 0) throw ConfigError("max_epochs must be non-negative");
  if (early_stop_patience < 0) throw ConfigError("early_stop_patience must be non-negative");
  if (!(grad_clip_norm > 0.0)) throw ConfigError("grad_clip_norm must be positive");
  if (!(r_m >= 0.0)) throw ConfigError("r_m must be non-negative");
  if (!(prior_weight >= 0.0)) throw ConfigError("prior_weight must be non-negative");
  if (warmup_epochs < 0 || ramp_epochs < 0) {
    throw ConfigError("warmup_epochs and ramp_epochs must be non-negative");
  }
  if (!(ramp_floor > 0.0 && ramp_floor <= 1.0)) throw ConfigError("ramp_floor must lie in (0, 1]");
}

double regularizer_scale(const TrainConfig& cfg, double progress) {
  const double w = cfg.warmup_epochs;
  if (cfg.warmup_epochs == 0 && cfg.ramp_epochs == 0) return 1.0;
  if (progress <= w) return 0.0;
  if (cfg.ramp_epochs == 0 || progress >= w + cfg.ramp_epochs) return 1.0;
  const double t = (progress - w) / cfg.ramp_epochs;
  return std::pow(cfg.ramp_floor, 1.0 - t);
}

ModelConfig model_config_for(const Dataset& ds, ModelConfig base) {
  base.n_features = static_cast<int>(ds.n_features());
  base.n_classes = std::max(2, ds.n_classes());
  base.categorical_cardinalities = ds.categorical_cardinalities();
  return base;
}

Prediction predict(const Model& model, const Matrix& X, std::size_t batch_rows) {
  Prediction out;
  const std::size_t n = X.rows();
  const auto k = static_cast<std::size_t>(model.config().n_steps);
  const auto d = static_cast<std::size_t>(model.config().n_features);
  out.probs = Matrix(n, static_cast<std::size_t>(model.config().n_classes));
  out.masks.steps.assign(k, Matrix(n, d));
  out.dists.logits.assign(k, Matrix(n, d));
  out.dists.probs.assign(k, Matrix(n, d));
  batch_rows = std::max<std::size_t>(batch_rows, 1);
  for (std::size_t first = 0; first < n; first += batch_rows) {
    const std::size_t count = std::min(batch_rows, n - first);
    const ForwardResult r =
        model.forward(slice_rows(X, first, count), ForwardMode::kExpected, 0);
    const Matrix probs = softmax_rows(r.class_logits);
    std::copy(probs.data(), probs.data() + probs.size(), out.probs.row(first).data());
    for (std::size_t s = 0; s < k; ++s) {
      std::copy(r.masks.steps[s].data(), r.masks.steps[s].data() + r.masks.steps[s].size(),
                out.masks.steps[s].row(first).data());
      std::copy(r.dists.logits[s].data(), r.dists.logits[s].data() + r.dists.logits[s].size(),
                out.dists.logits[s].row(first).data());
      std::copy(r.dists.probs[s].data(), r.dists.probs[s].data() + r.dists.probs[s].size(),
                out.dists.probs[s].row(first).data());
    }
  }
  return out;
}

double evaluate(const Prediction& pred, const Dataset& ds, Metric metric) {
  if (metric == Metric::kAccuracy) return accuracy(pred.probs, ds.y);
  if (ds.n_classes() > 2 || pred.probs.cols() != 2) {
    throw ConfigError("AUC is only defined for binary tasks");
  }
  std::vector<double> scores(pred.probs.rows());
  for (std::size_t r = 0; r < scores.size(); ++r) scores[r] = pred.probs(r, 1);
  return roc_auc(scores, ds.y);
}

double evaluate(const Model& model, const Dataset& ds, Metric metric) {
  if (metric == Metric::kAuc && ds.n_classes() > 2) {
    throw ConfigError("AUC is only defined for binary tasks");
  }
  CheckCompatible(model, ds, "evaluation");
  return evaluate(predict(model, ds.X), ds, metric);
}

TrainResult train(Model model, const Dataset& train_ds, const Dataset& val_ds,
                  const TrainConfig& cfg,
                  const std::function<void(const EpochRecord&)>& on_epoch) {
  cfg.validate();
  CheckCompatible(model, train_ds, "training");
  CheckCompatible(model, val_ds, "validation");
  if (cfg.selection_metric == Metric::kAuc && model.config().n_classes != 2) {
    throw ConfigError("AUC model selection needs a binary task");
  }
  TrainResult result{model, {}, -1, TrainStatus::kCompleted, {}, -1, 0.0};
  if (cfg.max_epochs == 0) return result;
  if (train_ds.n_rows() == 0 || val_ds.n_rows() == 0) {
    throw InputError("training and validation sets must be non-empty");
  }

  model.fit_input_normalization(train_ds.X);
  Adam adam(model.params(), AdamConfig{cfg.learning_rate});
  Gradients grads = model.make_gradients();
  const int schedule_end = cfg.warmup_epochs + cfg.ramp_epochs;
  // With fewer epochs than the schedule, every epoch is eligible.
  const int select_from = schedule_end < cfg.max_epochs ? schedule_end : 0;

  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed),
                    static_cast<std::uint32_t>(cfg.seed >> 32), 0x73687566u};
  std::mt19937_64 shuffle_rng(seq);
  std::vector<std::size_t> order(train_ds.n_rows());
  std::iota(order.begin(), order.end(), 0);

  std::vector<Param> best_params = model.params();
  double best_metric = -std::numeric_limits<double>::infinity();
  int since_best = 0;
  const auto batch = static_cast<std::size_t>(cfg.batch_size);

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss.r_m = cfg.r_m * regularizer_scale(cfg, epoch + 1.0);
    rec.train_loss.prior_weight = cfg.prior_weight * regularizer_scale(cfg, epoch + 1.0);
    bool diverged = false;
    try {
      for (std::size_t first = 0, b = 0; first < order.size(); first += batch, ++b) {
        const std::size_t count = std::min(batch, order.size() - first);
        const double scale = regularizer_scale(
            cfg, epoch + static_cast<double>(first + count) / static_cast<double>(order.size()));
        const LossOptions opts{cfg.r_m * scale, cfg.pairwise_mode, cfg.prior_weight * scale};
        const std::span<const std::size_t> idx(order.data() + first, count);
        const Matrix xb = gather_rows(train_ds.X, idx);
        std::vector<int> yb(count);
        for (std::size_t i = 0; i < count; ++i) yb[i] = train_ds.y[idx[i]];

        ForwardCache cache;
        const ForwardResult fr =
            model.forward(xb, ForwardMode::kSampled, BatchNoiseSeed(cfg.seed, epoch, b), &cache);
        LossGradients lg;
        const LossBreakdown lb = loss(fr.class_logits, yb, fr.dists, opts, &lg);
        grads.zero();
        model.backward(cache, lg.d_class_logits, lg.d_dist_logits, grads);
        const double norm = clip_grad_norm(grads, cfg.grad_clip_norm);
        if (!std::isfinite(norm)) throw NumericError("non-finite gradient norm");
        const double applied = std::min(norm, cfg.grad_clip_norm);
        if (applied > cfg.grad_clip_norm * (1.0 + 1e-12)) {
          throw NumericError("clipped gradient norm exceeds the bound");
        }
        rec.max_grad_norm = std::max(rec.max_grad_norm, applied);
        adam.step(model.params(), grads);
        if (!model.all_finite()) throw NumericError("non-finite parameters after update");
        AddScaled(rec.train_loss, lb,
                  static_cast<double>(count) / static_cast<double>(order.size()));
      }
      const Prediction vp = predict(model, val_ds.X);
      rec.val_metric = evaluate(vp, val_ds, cfg.selection_metric);
      rec.val_accuracy = cfg.selection_metric == Metric::kAccuracy
                             ? rec.val_metric
                             : evaluate(vp, val_ds, Metric::kAccuracy);
    } catch (const NumericError& e) {
      diverged = true;
      result.abort_reason = e.what();
    }
    if (diverged) {
      result.status = TrainStatus::kAborted;
      break;
    }

    result.history.push_back(rec);
    result.last_finite_epoch = epoch;
    result.max_applied_grad_norm = std::max(result.max_applied_grad_norm, rec.max_grad_norm);
    if (on_epoch) on_epoch(rec);
    if (epoch < select_from) continue;
    if (rec.val_metric > best_metric) {
      best_metric = rec.val_metric;
      best_params = model.params();
      result.best_epoch = epoch;
      since_best = 0;
    } else if (cfg.early_stop_patience > 0 && ++since_best >= cfg.early_stop_patience) {
      result.status = TrainStatus::kEarlyStopped;
      break;
    }
  }
  model.params() = std::move(best_params);
  result.model = std::move(model);
  return result;
}

MultiSeedResult multi_seed_eval(const ModelConfig& model_cfg, const TrainConfig& train_cfg,
                                const Dataset& train_ds, const Dataset& val_ds,
                                const Dataset& test_ds, const std::vector<std::uint64_t>& seeds,
                                Metric metric, int threads) {
  if (seeds.size() < 2) throw ConfigError("multi-seed evaluation needs at least 2 seeds");
  struct Outcome {
    bool ok = false;
    double value = 0.0;
    std::string message;
  };
  std::vector<Outcome> outcomes(seeds.size());
  auto run = [&](std::size_t i) {
    try {
      ModelConfig mc = model_cfg;
      mc.seed = seeds[i];
      TrainConfig tc = train_cfg;
      tc.seed = seeds[i];
      TrainResult r = train(Model(mc), train_ds, val_ds, tc);
      if (r.status == TrainStatus::kAborted) {
        outcomes[i].message = "training aborted: " + r.abort_reason;
        return;
      }
      outcomes[i].value = evaluate(r.model, test_ds, metric);
      outcomes[i].ok = true;
    } catch (const std::exception& e) {
      outcomes[i].message = e.what();
    }
  };
  if (threads <= 1) {
    for (std::size_t i = 0; i < seeds.size(); ++i) run(i);
  } else {
    std::mutex mu;
    std::size_t next = 0;
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (;;) {
          std::size_t i;
          {
            std::lock_guard<std::mutex> lock(mu);
            if (next >= seeds.size()) return;
            i = next++;
          }
          run(i);
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  MultiSeedResult out;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (outcomes[i].ok) {
      out.seeds.push_back(seeds[i]);
      out.values.push_back(outcomes[i].value);
    } else {
      out.failures.push_back({seeds[i], outcomes[i].message});
    }
  }
  out.mean = mean(out.values);
  out.std = sample_std(out.values);
  return out;
}

}  // namespace itabnet
