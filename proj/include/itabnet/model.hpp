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
#include <random>
#include <span>
#include <string>
#include <vector>

#include "itabnet/matrix.hpp"

namespace itabnet {

struct ModelConfig {
  int n_d = 16;  // decision width
  int n_a = 16;  // attention width, must equal n_d
  int n_steps = 4;
  // Optional TabNet-style prior scale; off by default, masks condition on
  // the previous mask through the attention input instead.
  bool use_prior_scale = false;
  double gamma = 1.3;
  // Gumbel-Softmax temperature used in sampled mode.
  double tau = 1.0;
  int n_features = 0;
  int n_classes = 2;
  // Gated blocks in each feature transformer: shared across steps, then
  // step-specific.
  int n_shared = 2;
  int n_independent = 2;
  int mlp_hidden = 32;
  // One entry per feature: 0 for numeric, otherwise the number of codes
  // (including the missing token).
  std::vector<int> categorical_cardinalities;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

// K matrices of N x D.
struct MaskTensor {
  std::vector<Matrix> steps;

  std::size_t n_steps() const { return steps.size(); }
  std::size_t n_samples() const { return steps.empty() ? 0 : steps[0].rows(); }
  std::size_t n_features() const { return steps.empty() ? 0 : steps[0].cols(); }
  bool empty() const { return steps.empty() || steps[0].empty(); }
};

// Per-step categorical parameters of each Gumbel-Softmax mask distribution.
struct MaskDistributions {
  std::vector<Matrix> logits;
  std::vector<Matrix> probs;  // row softmax of logits

  std::size_t n_steps() const { return logits.size(); }
  std::size_t n_samples() const { return logits.empty() ? 0 : logits[0].rows(); }
  std::size_t n_features() const { return logits.empty() ? 0 : logits[0].cols(); }

  static MaskDistributions from_logits(std::vector<Matrix> logits);
};

enum class ForwardMode {
  kSampled,   // Gumbel noise, temperature tau
  kExpected,  // softmax of the logits, no noise
};

// Row-wise softmax.
Matrix softmax_rows(const Matrix& logits);

// Standard Gumbel draws, row-major.
Matrix gumbel_noise(std::size_t rows, std::size_t cols, std::mt19937_64& rng);
std::mt19937_64 noise_stream(std::uint64_t noise_seed);

// softmax((logits + g) / tau) with g i.i.d. standard Gumbel drawn from
// noise_seed; g = 0 when deterministic is set. Throws ConfigError for tau <= 0.
Matrix sample_mask(const Matrix& logits, double tau, std::uint64_t noise_seed,
                   bool deterministic = false);

struct Param {
  std::string name;
  Matrix value;
  bool trainable = true;
};

// One gradient matrix per model parameter, same order and shapes.
struct Gradients {
  std::vector<Matrix> grads;

  void zero();
  double norm() const;
  void scale(double factor);
};

struct ForwardResult {
  Matrix class_logits;  // N x C
  MaskTensor masks;
  MaskDistributions dists;
};

// Intermediate activations kept for the backward pass.
struct ForwardCache {
  struct Glu {
    Matrix input;
    Matrix pre;  // N x 2w
  };
  struct Transformer {
    std::vector<Glu> blocks;
  };
  Matrix raw_x;
  Matrix embedded;  // N x D
  Transformer initial;
  std::vector<Matrix> attention_input;
  std::vector<Matrix> masks;
  std::vector<Matrix> masked_input;
  std::vector<Transformer> steps;
  std::vector<Matrix> step_output;  // N x (n_d + n_a)
  Matrix aggregate;
  Matrix hidden_pre;
  Matrix hidden;
  ForwardMode mode = ForwardMode::kExpected;
};

// TabNet-style encoder whose per-step attention masks are Gumbel-Softmax
// samples. Step 0 attends from the initial split of the embedded input; step
// k > 0 also sees the previous mask appended to its attention input. Each
// step's feature transformer reads mask * embedded input; the decision
// parts are summed and classified by a one-hidden-layer MLP.
//
// Parameters are read-only during forward(), so concurrent forward calls on
// one model are safe.
class Model {
 public:
  // Seeded initialization; throws ConfigError for an invalid config.
  explicit Model(ModelConfig cfg);

  const ModelConfig& config() const { return cfg_; }
  std::vector<Param>& params() { return params_; }
  const std::vector<Param>& params() const { return params_; }
  Param& param(const std::string& name);
  const Param& param(const std::string& name) const;

  Gradients make_gradients() const;

  // Sets the per-feature standardization of numeric columns from `train`.
  void fit_input_normalization(const Matrix& X);

  ForwardResult forward(const Matrix& X, ForwardMode mode, std::uint64_t noise_seed,
                        ForwardCache* cache = nullptr) const;

  // Accumulates parameter gradients given dLoss/d class_logits and
  // dLoss/d dists.logits[k] (the latter may be empty to skip).
  void backward(const ForwardCache& cache, const Matrix& d_class_logits,
                std::span<const Matrix> d_dist_logits, Gradients& grads) const;

  // FNV-1a over every parameter's bytes.
  std::uint64_t checksum() const;
  bool all_finite() const;

  // Copy whose feature axis is reordered: new feature i is old feature perm[i].
  Model permuted_features(std::span<const int> perm) const;

 private:
  struct Linear {
    std::size_t weight = 0;
    std::size_t bias = 0;
  };
  struct Transformer {
    std::vector<std::size_t> blocks;  // Linear indices, each in -> 2w gated
  };

  std::size_t add_param(std::string name, Matrix value, bool trainable = true);
  Linear add_linear(const std::string& name, int in, int out, std::mt19937_64& rng);
  void embed(const Matrix& X, Matrix& out) const;
  Matrix run_transformer(const Transformer& t, const Matrix& input,
                         ForwardCache::Transformer* cache) const;
  Matrix backprop_transformer(const Transformer& t, const ForwardCache::Transformer& cache,
                              const Matrix& d_out, Gradients& grads) const;
  Matrix linear_forward(const Linear& l, const Matrix& x) const;
  Matrix linear_backward(const Linear& l, const Matrix& x, const Matrix& d_out,
                         Gradients& grads) const;

  ModelConfig cfg_;
  std::vector<Param> params_;
  std::vector<Linear> linears_;
  std::size_t input_mean_ = 0;
  std::size_t input_scale_ = 0;
  std::vector<std::size_t> embeddings_;  // per feature, or npos
  std::vector<std::size_t> shared_;      // Linear indices
  Transformer initial_;
  std::vector<Transformer> step_transformers_;
  std::vector<Linear> attention_;
  Linear hidden_;
  Linear output_;
};

}  // namespace itabnet
