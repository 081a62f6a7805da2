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


#include "itabnet/objective.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "itabnet/errors.hpp"

namespace itabnet {
namespace {

void CheckDists(const MaskDistributions& dists) {
  if (dists.logits.size() != dists.probs.size()) {
    throw ShapeError("mask distributions need one probability matrix per step");
  }
  for (std::size_t k = 0; k < dists.probs.size(); ++k) {
    if (dists.probs[k].rows() != dists.n_samples() ||
        dists.probs[k].cols() != dists.n_features()) {
      throw ShapeError("mask distribution steps disagree in shape");
    }
  }
}

// Accumulates scale * dKL(p||q)/dp into dp and scale * dKL(p||q)/dq into dq.
void KlGradient(std::span<const double> p, std::span<const double> q, double scale,
                std::span<double> dp, std::span<double> dq) {
  for (std::size_t d = 0; d < p.size(); ++d) {
    const double pc = std::max(p[d], kKlEps);
    const double qc = std::max(q[d], kKlEps);
    if (p[d] > kKlEps) dp[d] += scale * (std::log(pc) + 1.0 - std::log(qc));
    if (q[d] > kKlEps) dq[d] -= scale * pc / q[d];
  }
}

}  // namespace

PairwiseMode parse_pairwise_mode(const std::string& name) {
  if (name == "all_pairs") return PairwiseMode::kAllPairs;
  if (name == "adjacent") return PairwiseMode::kAdjacent;
  throw ConfigError("unknown pairwise mode '" + name + "' (expected all_pairs or adjacent)");
}

std::string pairwise_mode_name(PairwiseMode mode) {
  return mode == PairwiseMode::kAllPairs ? "all_pairs" : "adjacent";
}

std::vector<std::pair<int, int>> step_pairs(int n_steps, PairwiseMode mode) {
  if (n_steps < 2) throw ConfigError("pairwise mask KL needs at least 2 steps");
  std::vector<std::pair<int, int>> pairs;
  if (mode == PairwiseMode::kAllPairs) {
    for (int i = 0; i < n_steps; ++i) {
      for (int j = 0; j < n_steps; ++j) {
        if (i != j) pairs.emplace_back(i, j);
      }
    }
  } else {
    for (int k = 0; k < n_steps; ++k) pairs.emplace_back(k, (k + 1) % n_steps);
  }
  return pairs;
}

double categorical_kl(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ShapeError("categorical_kl arguments differ in length");
  double kl = 0.0;
  for (std::size_t d = 0; d < p.size(); ++d) {
    const double pc = std::max(p[d], kKlEps);
    const double qc = std::max(q[d], kKlEps);
    kl += pc * std::log(pc / qc);
  }
  return kl;
}

double prior_kl(const MaskDistributions& dists) {
  CheckDists(dists);
  const std::size_t n = dists.n_samples();
  if (n == 0) return 0.0;
  const std::vector<double> uniform(dists.n_features(),
                                    1.0 / static_cast<double>(dists.n_features()));
  double sum = 0.0;
  for (const auto& probs : dists.probs) {
    for (std::size_t r = 0; r < n; ++r) sum += categorical_kl(probs.row(r), uniform);
  }
  return sum / static_cast<double>(n);
}

double pairwise_mask_kl(const MaskDistributions& dists, PairwiseMode mode) {
  CheckDists(dists);
  const auto pairs = step_pairs(static_cast<int>(dists.n_steps()), mode);
  const std::size_t n = dists.n_samples();
  if (n == 0) return 0.0;
  double sum = 0.0;
  for (const auto& [i, j] : pairs) {
    const Matrix& p = dists.probs[static_cast<std::size_t>(i)];
    const Matrix& q = dists.probs[static_cast<std::size_t>(j)];
    for (std::size_t r = 0; r < n; ++r) sum += categorical_kl(p.row(r), q.row(r));
  }
  return sum / static_cast<double>(n);
}

LossBreakdown loss(const Matrix& class_logits, std::span<const int> y,
                   const MaskDistributions& dists, const LossOptions& opts,
                   LossGradients* grads) {
  const std::size_t n = class_logits.rows();
  const std::size_t c = class_logits.cols();
  if (y.size() != n) throw ShapeError("label count differs from logit rows");
  if (dists.n_steps() > 0 && dists.n_samples() != n) {
    throw ShapeError("mask distributions and logits differ in sample count");
  }
  if (!class_logits.all_finite()) throw NumericError("non-finite class logits");
  if (opts.r_m < 0.0) throw ConfigError("r_m must be non-negative");
  for (int label : y) {
    if (label < 0 || static_cast<std::size_t>(label) >= c) {
      throw DataError("label " + std::to_string(label) + " outside [0, " + std::to_string(c) + ")");
    }
  }

  LossBreakdown b;
  b.r_m = opts.r_m;
  b.prior_weight = opts.prior_weight;
  const double inv_n = n ? 1.0 / static_cast<double>(n) : 0.0;

  if (grads) grads->d_class_logits = Matrix(n, c);
  double nll = 0.0;
  std::vector<double> p(c);
  for (std::size_t r = 0; r < n; ++r) {
    const auto row = class_logits.row(r);
    const double mx = *std::max_element(row.begin(), row.end());
    double z = 0.0;
    for (std::size_t k = 0; k < c; ++k) {
      p[k] = std::exp(row[k] - mx);
      z += p[k];
    }
    const auto label = static_cast<std::size_t>(y[r]);
    nll += std::log(z) - (row[label] - mx);
    if (grads) {
      for (std::size_t k = 0; k < c; ++k) {
        grads->d_class_logits(r, k) = (p[k] / z - (k == label ? 1.0 : 0.0)) * inv_n;
      }
    }
  }
  b.nll = nll * inv_n;

  const std::size_t steps = dists.n_steps();
  if (steps > 0) {
    b.prior_kl = prior_kl(dists);
    b.pairwise_kl = steps >= 2 ? pairwise_mask_kl(dists, opts.mode) : 0.0;
  }
  b.total = b.nll + b.prior_weight * b.prior_kl - b.r_m * b.pairwise_kl;
  if (!std::isfinite(b.total)) throw NumericError("non-finite loss");

  if (grads) {
    grads->d_dist_logits.clear();
    const std::size_t d = dists.n_features();
    std::vector<Matrix> d_probs(steps, Matrix(n, d));
    const double u = d ? 1.0 / static_cast<double>(d) : 0.0;
    std::vector<double> uniform(d, u), sink(d);
    for (std::size_t k = 0; k < steps; ++k) {
      for (std::size_t r = 0; r < n; ++r) {
        KlGradient(dists.probs[k].row(r), uniform, b.prior_weight * inv_n, d_probs[k].row(r), sink);
      }
    }
    if (steps >= 2 && b.r_m != 0.0) {
      for (const auto& [i, j] : step_pairs(static_cast<int>(steps), opts.mode)) {
        const auto si = static_cast<std::size_t>(i), sj = static_cast<std::size_t>(j);
        for (std::size_t r = 0; r < n; ++r) {
          KlGradient(dists.probs[si].row(r), dists.probs[sj].row(r), -b.r_m * inv_n,
                     d_probs[si].row(r), d_probs[sj].row(r));
        }
      }
    }
    // Softmax backward onto the logits.
    for (std::size_t k = 0; k < steps; ++k) {
      Matrix dz(n, d);
      const Matrix& s = dists.probs[k];
      for (std::size_t r = 0; r < n; ++r) {
        double inner = 0.0;
        for (std::size_t j = 0; j < d; ++j) inner += s(r, j) * d_probs[k](r, j);
        for (std::size_t j = 0; j < d; ++j) dz(r, j) = s(r, j) * (d_probs[k](r, j) - inner);
      }
      grads->d_dist_logits.push_back(std::move(dz));
    }
  }
  return b;
}

std::string metrics_json_line(int epoch, const LossBreakdown& b, double accuracy) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "{\"epoch\":%d,\"nll\":%.10g,\"prior_kl\":%.10g,\"pairwise_kl\":%.10g,"
                "\"total\":%.10g,\"accuracy\":%.10g}",
                epoch, b.nll, b.prior_kl, b.pairwise_kl, b.total, accuracy);
  return buf;
}

}  // namespace itabnet
