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

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "itabnet/matrix.hpp"
#include "itabnet/model.hpp"

namespace itabnet {

// Lower clamp applied to both arguments of every categorical KL.
inline constexpr double kKlEps = 1e-8;

enum class PairwiseMode { kAllPairs, kAdjacent };

PairwiseMode parse_pairwise_mode(const std::string& name);
std::string pairwise_mode_name(PairwiseMode mode);

// Directed step pairs (i, j) contributing KL(step i || step j). all_pairs is
// every ordered i != j; adjacent is the cycle (0,1), (1,2), ..., (K-1,0).
// Throws ConfigError for K < 2.
std::vector<std::pair<int, int>> step_pairs(int n_steps, PairwiseMode mode);

// sum_d p_d ln(p_d / q_d) with both sides clamped below at kKlEps.
double categorical_kl(std::span<const double> p, std::span<const double> q);

// Mean over samples of sum over steps of KL(step || uniform).
double prior_kl(const MaskDistributions& dists);

// Mean over samples of the directed KL sum over step_pairs(K, mode).
double pairwise_mask_kl(const MaskDistributions& dists, PairwiseMode mode);

struct LossBreakdown {
  double nll = 0.0;
  double prior_kl = 0.0;
  double pairwise_kl = 0.0;
  double r_m = 0.0;
  double prior_weight = 1.0;
  double total = 0.0;  // nll + prior_weight * prior_kl - r_m * pairwise_kl
};

struct LossOptions {
  double r_m = 0.0;
  PairwiseMode mode = PairwiseMode::kAllPairs;
  double prior_weight = 1.0;
};

// dTotal/d class_logits and dTotal/d dists.logits[k].
struct LossGradients {
  Matrix d_class_logits;
  std::vector<Matrix> d_dist_logits;
};

// Throws DataError for labels outside [0, C) and NumericError for non-finite
// logits. Gradients are filled when `grads` is non-null.
LossBreakdown loss(const Matrix& class_logits, std::span<const int> y,
                   const MaskDistributions& dists, const LossOptions& opts,
                   LossGradients* grads = nullptr);

// {"epoch":..,"nll":..,"prior_kl":..,"pairwise_kl":..,"total":..,"accuracy":..}
std::string metrics_json_line(int epoch, const LossBreakdown& b, double accuracy);

}  // namespace itabnet
