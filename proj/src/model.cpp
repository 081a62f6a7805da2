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

#include "itabnet/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "itabnet/errors.hpp"
#include "itabnet/kernels.hpp"

namespace itabnet {
namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
constexpr double kPriorFloor = 1e-8;
const double kResidualScale = std::sqrt(0.5);

inline double Sigmoid(double x) {
  return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

void SoftmaxRowInPlace(std::span<double> row) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : row) mx = std::max(mx, v);
  double sum = 0.0;
  for (double& v : row) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (double& v : row) v /= sum;
}

// d_in = s * (d_out - <d_out, s>) for s = softmax(.) per row.
Matrix SoftmaxBackward(const Matrix& s, const Matrix& d_out) {
  Matrix d_in(s.rows(), s.cols());
  const auto& k = kernels::active();
  for (std::size_t r = 0; r < s.rows(); ++r) {
    const double inner = k.dot(s.row(r).data(), d_out.row(r).data(), s.cols());
    for (std::size_t c = 0; c < s.cols(); ++c) d_in(r, c) = s(r, c) * (d_out(r, c) - inner);
  }
  return d_in;
}

void CheckFinite(const Matrix& m, const char* what, int step) {
  if (!m.all_finite()) {
    throw NumericError(std::string("non-finite ") + what +
                           (step >= 0 ? " at step " + std::to_string(step) : std::string()),
                       step);
  }
}

void AddColumnSums(const Matrix& m, Matrix& bias_grad) {
  const auto& k = kernels::active();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    k.axpy(1.0, m.row(r).data(), bias_grad.data(), m.cols());
  }
}

}  // namespace

void ModelConfig::validate() const {
  if (n_d <= 0 || n_a <= 0) throw ConfigError("n_d and n_a must be positive");
  if (n_d != n_a) throw ConfigError("n_d must equal n_a");
  if (n_steps < 2) throw ConfigError("n_steps must be at least 2");
  if (!(tau > 0.0)) throw ConfigError("tau must be positive");
  if (use_prior_scale && !(gamma >= 1.0)) throw ConfigError("gamma must be >= 1");
  if (n_features <= 0) throw ConfigError("n_features must be positive");
  if (n_classes < 2) throw ConfigError("n_classes must be at least 2");
  if (n_shared < 0 || n_independent < 0 || n_shared + n_independent < 1) {
    throw ConfigError("feature transformer needs at least one block");
  }
  if (mlp_hidden <= 0) throw ConfigError("mlp_hidden must be positive");
  if (!categorical_cardinalities.empty() &&
      categorical_cardinalities.size() != static_cast<std::size_t>(n_features)) {
    throw ConfigError("categorical_cardinalities must have one entry per feature");
  }
  for (int c : categorical_cardinalities) {
    if (c < 0) throw ConfigError("negative categorical cardinality");
  }
}

MaskDistributions MaskDistributions::from_logits(std::vector<Matrix> logits) {
  MaskDistributions d;
  d.probs.reserve(logits.size());
  for (const auto& l : logits) d.probs.push_back(softmax_rows(l));
  d.logits = std::move(logits);
  return d;
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix out = logits;
  for (std::size_t r = 0; r < out.rows(); ++r) SoftmaxRowInPlace(out.row(r));
  return out;
}

std::mt19937_64 noise_stream(std::uint64_t noise_seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(noise_seed),
                    static_cast<std::uint32_t>(noise_seed >> 32), 0x6d61736bu};
  return std::mt19937_64(seq);
}

Matrix gumbel_noise(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  Matrix g(rows, cols);
  // Open interval (0, 1): 53-bit mantissa offset by half a step.
  for (double& v : g.values()) {
    const double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
    v = -std::log(-std::log(u));
  }
  return g;
}

Matrix sample_mask(const Matrix& logits, double tau, std::uint64_t noise_seed,
                   bool deterministic) {
  if (!(tau > 0.0)) throw ConfigError("temperature must be positive");
  if (!logits.all_finite()) throw NumericError("non-finite mask logits");
  Matrix z = logits;
  if (!deterministic) {
    auto rng = noise_stream(noise_seed);
    const Matrix g = gumbel_noise(logits.rows(), logits.cols(), rng);
    for (std::size_t i = 0; i < z.size(); ++i) z.data()[i] += g.data()[i];
  }
  for (double& v : z.values()) v /= tau;
  for (std::size_t r = 0; r < z.rows(); ++r) SoftmaxRowInPlace(z.row(r));
  return z;
}

void Gradients::zero() {
  for (auto& g : grads) g.fill(0.0);
}

double Gradients::norm() const {
  double s = 0.0;
  for (const auto& g : grads) s += kernels::active().sumsq(g.data(), g.size());
  return std::sqrt(s);
}

void Gradients::scale(double factor) {
  for (auto& g : grads) {
    for (double& v : g.values()) v *= factor;
  }
}

std::size_t Model::add_param(std::string name, Matrix value, bool trainable) {
  params_.push_back({std::move(name), std::move(value), trainable});
  return params_.size() - 1;
}

Model::Linear Model::add_linear(const std::string& name, int in, int out,
                                std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
  std::uniform_real_distribution<double> init(-limit, limit);
  Matrix w(static_cast<std::size_t>(out), static_cast<std::size_t>(in));
  for (double& v : w.values()) v = init(rng);
  Linear l;
  l.weight = add_param(name + ".weight", std::move(w));
  l.bias = add_param(name + ".bias", Matrix(1, static_cast<std::size_t>(out)));
  return l;
}

Model::Model(ModelConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  if (cfg_.categorical_cardinalities.empty()) {
    cfg_.categorical_cardinalities.assign(static_cast<std::size_t>(cfg_.n_features), 0);
  }
  std::seed_seq seq{static_cast<std::uint32_t>(cfg_.seed),
                    static_cast<std::uint32_t>(cfg_.seed >> 32), 0x696e6974u};
  std::mt19937_64 rng(seq);
  const int d = cfg_.n_features;
  const int width = cfg_.n_d + cfg_.n_a;

  input_mean_ = add_param("input.mean", Matrix(1, static_cast<std::size_t>(d), 0.0), false);
  input_scale_ = add_param("input.scale", Matrix(1, static_cast<std::size_t>(d), 1.0), false);
  embeddings_.assign(static_cast<std::size_t>(d), kNone);
  std::normal_distribution<double> embed_init(0.0, 1.0);
  for (int j = 0; j < d; ++j) {
    const int card = cfg_.categorical_cardinalities[static_cast<std::size_t>(j)];
    if (card == 0) continue;
    Matrix table(static_cast<std::size_t>(card), 1);
    for (double& v : table.values()) v = embed_init(rng);
    embeddings_[static_cast<std::size_t>(j)] =
        add_param("embed." + std::to_string(j), std::move(table));
  }

  auto add_block = [&](const std::string& name, int in) {
    linears_.push_back(add_linear(name, in, 2 * width, rng));
    return linears_.size() - 1;
  };
  for (int b = 0; b < cfg_.n_shared; ++b) {
    shared_.push_back(add_block("shared." + std::to_string(b), b == 0 ? d : width));
  }
  auto make_transformer = [&](const std::string& prefix) {
    Transformer t;
    t.blocks = shared_;
    for (int b = 0; b < cfg_.n_independent; ++b) {
      const bool first = cfg_.n_shared == 0 && b == 0;
      t.blocks.push_back(add_block(prefix + "." + std::to_string(b), first ? d : width));
    }
    return t;
  };
  initial_ = make_transformer("initial");
  for (int k = 0; k < cfg_.n_steps; ++k) {
    const std::string prefix = "step" + std::to_string(k);
    step_transformers_.push_back(make_transformer(prefix + ".ft"));
    attention_.push_back(
        add_linear(prefix + ".attention", k == 0 ? cfg_.n_a : cfg_.n_a + d, d, rng));
  }
  hidden_ = add_linear("mlp.hidden", cfg_.n_d, cfg_.mlp_hidden, rng);
  output_ = add_linear("mlp.output", cfg_.mlp_hidden, cfg_.n_classes, rng);
}

Param& Model::param(const std::string& name) {
  for (auto& p : params_) {
    if (p.name == name) return p;
  }
  throw ConfigError("no parameter named " + name);
}

const Param& Model::param(const std::string& name) const {
  return const_cast<Model*>(this)->param(name);
}

Gradients Model::make_gradients() const {
  Gradients g;
  g.grads.reserve(params_.size());
  for (const auto& p : params_) g.grads.emplace_back(p.value.rows(), p.value.cols());
  return g;
}

void Model::fit_input_normalization(const Matrix& X) {
  if (X.cols() != static_cast<std::size_t>(cfg_.n_features)) {
    throw ShapeError("normalization data has the wrong feature count");
  }
  Matrix& mean = params_[input_mean_].value;
  Matrix& scale = params_[input_scale_].value;
  const double n = static_cast<double>(X.rows());
  for (std::size_t j = 0; j < X.cols(); ++j) {
    if (embeddings_[j] != kNone || X.rows() == 0) {
      mean(0, j) = 0.0;
      scale(0, j) = 1.0;
      continue;
    }
    double m = 0.0;
    for (std::size_t r = 0; r < X.rows(); ++r) m += X(r, j);
    m /= n;
    double var = 0.0;
    for (std::size_t r = 0; r < X.rows(); ++r) var += (X(r, j) - m) * (X(r, j) - m);
    var /= n;
    mean(0, j) = m;
    scale(0, j) = var > 1e-24 ? std::sqrt(var) : 1.0;
  }
}

void Model::embed(const Matrix& X, Matrix& out) const {
  const Matrix& mean = params_[input_mean_].value;
  const Matrix& scale = params_[input_scale_].value;
  out.resize(X.rows(), X.cols());
  for (std::size_t j = 0; j < X.cols(); ++j) {
    if (embeddings_[j] != kNone) {
      const Matrix& table = params_[embeddings_[j]].value;
      const auto last = static_cast<long>(table.rows()) - 1;
      for (std::size_t r = 0; r < X.rows(); ++r) {
        long code = std::lround(X(r, j));
        if (code < 0 || code > last) code = last;  // unseen -> missing token
        out(r, j) = table(static_cast<std::size_t>(code), 0);
      }
    } else {
      for (std::size_t r = 0; r < X.rows(); ++r) {
        out(r, j) = (X(r, j) - mean(0, j)) / scale(0, j);
      }
    }
  }
}

Matrix Model::linear_forward(const Linear& l, const Matrix& x) const {
  Matrix y;
  matmul_nt(x, params_[l.weight].value, y);
  const Matrix& b = params_[l.bias].value;
  const auto& k = kernels::active();
  for (std::size_t r = 0; r < y.rows(); ++r) k.axpy(1.0, b.data(), y.row(r).data(), y.cols());
  return y;
}

Matrix Model::linear_backward(const Linear& l, const Matrix& x, const Matrix& d_out,
                              Gradients& grads) const {
  matmul_tn(d_out, x, grads.grads[l.weight], /*accumulate=*/true);
  AddColumnSums(d_out, grads.grads[l.bias]);
  Matrix d_in;
  matmul_nn(d_out, params_[l.weight].value, d_in);
  return d_in;
}

Matrix Model::run_transformer(const Transformer& t, const Matrix& input,
                              ForwardCache::Transformer* cache) const {
  Matrix x = input;
  if (cache) cache->blocks.clear();
  for (std::size_t b = 0; b < t.blocks.size(); ++b) {
    Matrix pre = linear_forward(linears_[t.blocks[b]], x);
    const std::size_t w = pre.cols() / 2;
    Matrix gated(pre.rows(), w);
    for (std::size_t r = 0; r < pre.rows(); ++r) {
      for (std::size_t c = 0; c < w; ++c) gated(r, c) = pre(r, c) * Sigmoid(pre(r, c + w));
    }
    if (b > 0) {
      for (std::size_t i = 0; i < gated.size(); ++i) {
        gated.data()[i] = (gated.data()[i] + x.data()[i]) * kResidualScale;
      }
    }
    if (cache) cache->blocks.push_back({std::move(x), std::move(pre)});
    x = std::move(gated);
  }
  return x;
}

Matrix Model::backprop_transformer(const Transformer& t, const ForwardCache::Transformer& cache,
                                   const Matrix& d_out, Gradients& grads) const {
  Matrix d = d_out;
  for (std::size_t bi = t.blocks.size(); bi-- > 0;) {
    const auto& blk = cache.blocks[bi];
    const std::size_t w = blk.pre.cols() / 2;
    if (bi > 0) {
      for (double& v : d.values()) v *= kResidualScale;
    }
    Matrix d_pre(blk.pre.rows(), 2 * w);
    for (std::size_t r = 0; r < d_pre.rows(); ++r) {
      for (std::size_t c = 0; c < w; ++c) {
        const double a = blk.pre(r, c);
        const double s = Sigmoid(blk.pre(r, c + w));
        d_pre(r, c) = d(r, c) * s;
        d_pre(r, c + w) = d(r, c) * a * s * (1.0 - s);
      }
    }
    Matrix d_in = linear_backward(linears_[t.blocks[bi]], blk.input, d_pre, grads);
    if (bi > 0) {
      for (std::size_t i = 0; i < d_in.size(); ++i) d_in.data()[i] += d.data()[i];
    }
    d = std::move(d_in);
  }
  return d;
}

ForwardResult Model::forward(const Matrix& X, ForwardMode mode, std::uint64_t noise_seed,
                             ForwardCache* cache) const {
  const auto d = static_cast<std::size_t>(cfg_.n_features);
  const auto nd = static_cast<std::size_t>(cfg_.n_d);
  const auto na = static_cast<std::size_t>(cfg_.n_a);
  if (X.cols() != d) {
    throw ShapeError("input has " + std::to_string(X.cols()) + " columns, model expects " +
                     std::to_string(d));
  }
  const std::size_t n = X.rows();
  const auto& kern = kernels::active();

  Matrix embedded;
  embed(X, embedded);

  ForwardCache::Transformer* init_cache = cache ? &cache->initial : nullptr;
  Matrix attention_part = slice_cols(run_transformer(initial_, embedded, init_cache), nd, na);

  auto rng = noise_stream(noise_seed);
  ForwardResult result;
  result.dists.logits.reserve(static_cast<std::size_t>(cfg_.n_steps));
  Matrix aggregate(n, nd);
  Matrix log_prior;
  if (cfg_.use_prior_scale) log_prior = Matrix(n, d, 0.0);
  Matrix prev_mask;

  if (cache) {
    cache->mode = mode;
    cache->raw_x = X;
    cache->attention_input.clear();
    cache->masks.clear();
    cache->masked_input.clear();
    cache->steps.clear();
    cache->step_output.clear();
  }

  for (int k = 0; k < cfg_.n_steps; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    Matrix att_in = k == 0 ? std::move(attention_part) : hconcat(attention_part, prev_mask);
    Matrix logits = linear_forward(attention_[ks], att_in);
    if (cfg_.use_prior_scale) {
      for (std::size_t i = 0; i < logits.size(); ++i) logits.data()[i] += log_prior.data()[i];
    }
    CheckFinite(logits, "attention logits", k);

    Matrix mask;
    if (mode == ForwardMode::kSampled) {
      mask = logits;
      const Matrix g = gumbel_noise(n, d, rng);
      for (std::size_t i = 0; i < mask.size(); ++i) {
        mask.data()[i] = (mask.data()[i] + g.data()[i]) / cfg_.tau;
      }
      for (std::size_t r = 0; r < n; ++r) SoftmaxRowInPlace(mask.row(r));
    } else {
      mask = softmax_rows(logits);
    }

    Matrix masked(n, d);
    kern.mul(mask.data(), embedded.data(), masked.data(), masked.size());

    ForwardCache::Transformer* step_cache = nullptr;
    if (cache) {
      cache->steps.emplace_back();
      step_cache = &cache->steps.back();
    }
    Matrix out = run_transformer(step_transformers_[ks], masked, step_cache);
    CheckFinite(out, "feature transformer output", k);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < nd; ++c) aggregate(r, c) += out(r, c);
    }
    attention_part = slice_cols(out, nd, na);

    if (cfg_.use_prior_scale) {
      for (std::size_t i = 0; i < mask.size(); ++i) {
        log_prior.data()[i] += std::log(std::max(cfg_.gamma - mask.data()[i], kPriorFloor));
      }
    }

    if (cache) {
      cache->attention_input.push_back(std::move(att_in));
      cache->masks.push_back(mask);
      cache->masked_input.push_back(std::move(masked));
      cache->step_output.push_back(std::move(out));
    }
    prev_mask = mask;
    result.masks.steps.push_back(std::move(mask));
    result.dists.logits.push_back(std::move(logits));
  }

  Matrix hidden_pre = linear_forward(hidden_, aggregate);
  Matrix hidden = hidden_pre;
  for (double& v : hidden.values()) v = std::max(0.0, v);
  result.class_logits = linear_forward(output_, hidden);
  CheckFinite(result.class_logits, "class logits", -1);

  result.dists.probs.reserve(result.dists.logits.size());
  for (const auto& l : result.dists.logits) result.dists.probs.push_back(softmax_rows(l));

  if (cache) {
    cache->embedded = std::move(embedded);
    cache->aggregate = std::move(aggregate);
    cache->hidden_pre = std::move(hidden_pre);
    cache->hidden = std::move(hidden);
  }
  return result;
}

void Model::backward(const ForwardCache& cache, const Matrix& d_class_logits,
                     std::span<const Matrix> d_dist_logits, Gradients& grads) const {
  const auto d = static_cast<std::size_t>(cfg_.n_features);
  const auto nd = static_cast<std::size_t>(cfg_.n_d);
  const auto na = static_cast<std::size_t>(cfg_.n_a);
  const std::size_t n = cache.raw_x.rows();
  const auto steps = static_cast<std::size_t>(cfg_.n_steps);
  if (d_class_logits.rows() != n || d_class_logits.cols() != static_cast<std::size_t>(cfg_.n_classes)) {
    throw ShapeError("class-logit gradient has the wrong shape");
  }
  if (!d_dist_logits.empty() && d_dist_logits.size() != steps) {
    throw ShapeError("one distribution-logit gradient per step expected");
  }
  if (grads.grads.size() != params_.size()) throw ShapeError("gradient buffer mismatch");
  const auto& kern = kernels::active();

  Matrix d_hidden = linear_backward(output_, cache.hidden, d_class_logits, grads);
  for (std::size_t i = 0; i < d_hidden.size(); ++i) {
    if (cache.hidden_pre.data()[i] <= 0.0) d_hidden.data()[i] = 0.0;
  }
  const Matrix d_aggregate = linear_backward(hidden_, cache.aggregate, d_hidden, grads);

  Matrix d_embedded(n, d);
  std::vector<Matrix> d_mask(steps, Matrix(n, d));
  Matrix d_attention_next;  // gradient w.r.t. the attention part of step k's output
  Matrix d_initial_attention;

  for (std::size_t k = steps; k-- > 0;) {
    Matrix d_out(n, nd + na);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < nd; ++c) {
        d_out(r, c) = d_aggregate(r, c);
      }
      if (!d_attention_next.empty()) {
        for (std::size_t c = 0; c < na; ++c) d_out(r, nd + c) = d_attention_next(r, c);
      }
    }
    const Matrix d_masked =
        backprop_transformer(step_transformers_[k], cache.steps[k], d_out, grads);
    const Matrix& mask = cache.masks[k];
    for (std::size_t i = 0; i < d_masked.size(); ++i) {
      d_mask[k].data()[i] += d_masked.data()[i] * cache.embedded.data()[i];
      d_embedded.data()[i] += d_masked.data()[i] * mask.data()[i];
    }

    Matrix d_logits = SoftmaxBackward(mask, d_mask[k]);
    if (cache.mode == ForwardMode::kSampled) {
      for (double& v : d_logits.values()) v /= cfg_.tau;
    }
    if (!d_dist_logits.empty()) {
      const Matrix& extra = d_dist_logits[k];
      if (extra.rows() != n || extra.cols() != d) throw ShapeError("distribution gradient shape");
      kern.axpy(1.0, extra.data(), d_logits.data(), d_logits.size());
    }
    if (cfg_.use_prior_scale) {
      for (std::size_t j = 0; j < k; ++j) {
        const Matrix& mj = cache.masks[j];
        for (std::size_t i = 0; i < mj.size(); ++i) {
          const double gap = cfg_.gamma - mj.data()[i];
          if (gap > kPriorFloor) d_mask[j].data()[i] -= d_logits.data()[i] / gap;
        }
      }
    }

    const Matrix d_att_in =
        linear_backward(attention_[k], cache.attention_input[k], d_logits, grads);
    if (k > 0) {
      d_attention_next = slice_cols(d_att_in, 0, na);
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < d; ++c) d_mask[k - 1](r, c) += d_att_in(r, na + c);
      }
    } else {
      d_initial_attention = d_att_in;
    }
  }

  Matrix d_initial_out(n, nd + na);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < na; ++c) d_initial_out(r, nd + c) = d_initial_attention(r, c);
  }
  const Matrix d_from_initial = backprop_transformer(initial_, cache.initial, d_initial_out, grads);
  kern.axpy(1.0, d_from_initial.data(), d_embedded.data(), d_embedded.size());

  for (std::size_t j = 0; j < d; ++j) {
    if (embeddings_[j] == kNone) continue;
    Matrix& table_grad = grads.grads[embeddings_[j]];
    const auto last = static_cast<long>(table_grad.rows()) - 1;
    for (std::size_t r = 0; r < n; ++r) {
      long code = std::lround(cache.raw_x(r, j));
      if (code < 0 || code > last) code = last;
      table_grad(static_cast<std::size_t>(code), 0) += d_embedded(r, j);
    }
  }
}

std::uint64_t Model::checksum() const {
  std::uint64_t h = 1469598103934665603ull;
  for (const auto& p : params_) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(p.value.data());
    for (std::size_t i = 0; i < p.value.size() * sizeof(double); ++i) {
      h ^= bytes[i];
      h *= 1099511628211ull;
    }
  }
  return h;
}

bool Model::all_finite() const {
  return std::all_of(params_.begin(), params_.end(),
                     [](const Param& p) { return p.value.all_finite(); });
}

Model Model::permuted_features(std::span<const int> perm) const {
  const auto d = static_cast<std::size_t>(cfg_.n_features);
  if (perm.size() != d) throw ShapeError("permutation length must equal n_features");
  std::vector<bool> seen(d, false);
  for (int p : perm) {
    if (p < 0 || static_cast<std::size_t>(p) >= d || seen[static_cast<std::size_t>(p)]) {
      throw ConfigError("not a permutation");
    }
    seen[static_cast<std::size_t>(p)] = true;
  }
  ModelConfig cfg = cfg_;
  for (std::size_t i = 0; i < d; ++i) {
    cfg.categorical_cardinalities[i] =
        cfg_.categorical_cardinalities[static_cast<std::size_t>(perm[i])];
  }
  Model out(cfg);
  // Same structure, so every non-embedding parameter lines up by index.
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (params_[i].name.rfind("embed.", 0) == 0) continue;
    out.params_[i].value = params_[i].value;
  }
  for (std::size_t i = 0; i < d; ++i) {
    const auto src = static_cast<std::size_t>(perm[i]);
    if (embeddings_[src] != kNone) {
      out.params_[out.embeddings_[i]].value = params_[embeddings_[src]].value;
    }
  }
  auto permute_cols = [&](Matrix& m, std::size_t offset) {
    const Matrix orig = m;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      for (std::size_t i = 0; i < d; ++i) {
        m(r, offset + i) = orig(r, offset + static_cast<std::size_t>(perm[i]));
      }
    }
  };
  auto permute_rows = [&](Matrix& m) {
    const Matrix orig = m;
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t c = 0; c < m.cols(); ++c) {
        m(i, c) = orig(static_cast<std::size_t>(perm[i]), c);
      }
    }
  };
  permute_cols(out.params_[out.input_mean_].value, 0);
  permute_cols(out.params_[out.input_scale_].value, 0);
  // First gated block of every transformer reads the D-wide input.
  std::vector<std::size_t> first_blocks;
  if (!shared_.empty()) {
    first_blocks.push_back(shared_[0]);
  } else {
    first_blocks.push_back(initial_.blocks[0]);
    for (const auto& t : step_transformers_) first_blocks.push_back(t.blocks[0]);
  }
  for (std::size_t li : first_blocks) permute_cols(out.params_[linears_[li].weight].value, 0);
  for (std::size_t k = 0; k < attention_.size(); ++k) {
    Matrix& w = out.params_[attention_[k].weight].value;
    permute_rows(w);
    if (k > 0) permute_cols(w, static_cast<std::size_t>(cfg_.n_a));
    permute_cols(out.params_[attention_[k].bias].value, 0);
  }
  return out;
}

}  // namespace itabnet
