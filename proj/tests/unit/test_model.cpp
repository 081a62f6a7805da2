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


#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "itabnet/errors.hpp"
#include "itabnet/model.hpp"

namespace itabnet {
namespace {

Matrix RandomInput(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Matrix x(n, d);
  for (double& v : x.values()) v = nd(rng);
  return x;
}

ModelConfig Small(int d, int k, std::uint64_t seed) {
  ModelConfig c;
  c.n_features = d;
  c.n_steps = k;
  c.n_d = c.n_a = 8;
  c.mlp_hidden = 8;
  c.seed = seed;
  return c;
}

void CheckRowsNormalized(const Matrix& m, double tol) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double s = 0;
    for (double v : m.row(r)) {
      REQUIRE(v >= 0.0);
      REQUIRE(v <= 1.0 + 1e-12);
      s += v;
    }
    REQUIRE(std::abs(s - 1.0) <= tol);
  }
}

}  // namespace

TEST_CASE("same seed gives bit-identical parameters") {
  ModelConfig c = Small(14, 4, 7);
  c.categorical_cardinalities.assign(14, 0);
  c.categorical_cardinalities[1] = 9;
  CHECK(Model(c).checksum() == Model(c).checksum());
  ModelConfig other = c;
  other.seed = 8;
  CHECK(Model(other).checksum() != Model(c).checksum());
}

TEST_CASE("model config invariants") {
  ModelConfig c = Small(5, 2, 0);
  c.n_a = 4;
  CHECK_THROWS_AS(Model{c}, ConfigError);
  c = Small(5, 1, 0);
  CHECK_THROWS_AS(Model{c}, ConfigError);
  c = Small(0, 2, 0);
  CHECK_THROWS_AS(Model{c}, ConfigError);
  c = Small(5, 2, 0);
  c.tau = 0.0;
  CHECK_THROWS_AS(Model{c}, ConfigError);
}

TEST_CASE("attention layer emits one logit per feature") {
  ModelConfig c = Small(11, 2, 1);
  c.n_d = c.n_a = 16;
  const Model m(c);
  const Matrix& w = m.param("step0.attention.weight").value;
  CHECK((w.rows() == 11 || w.cols() == 11));
  const ForwardResult out = m.forward(RandomInput(6, 11, 2), ForwardMode::kExpected, 0);
  REQUIRE(out.dists.n_steps() == 2);
  CHECK(out.dists.logits[0].cols() == 11);
}

TEST_CASE("forward shapes for three samples, five features, two steps") {
  ModelConfig c = Small(5, 2, 3);
  c.n_classes = 3;
  const Model m(c);
  const ForwardResult out = m.forward(RandomInput(3, 5, 4), ForwardMode::kSampled, 11);
  CHECK(out.masks.n_steps() == 2);
  CHECK(out.masks.n_samples() == 3);
  CHECK(out.masks.n_features() == 5);
  CHECK(out.class_logits.rows() == 3);
  CHECK(out.class_logits.cols() == 3);
  CHECK_THROWS_AS(m.forward(RandomInput(3, 4, 4), ForwardMode::kExpected, 0), ShapeError);
}

TEST_CASE("forward is deterministic per mode and noise seed") {
  const Model m(Small(6, 3, 5));
  const Matrix x = RandomInput(20, 6, 6);
  const auto e1 = m.forward(x, ForwardMode::kExpected, 1);
  const auto e2 = m.forward(x, ForwardMode::kExpected, 2);
  CHECK(e1.class_logits == e2.class_logits);
  CHECK(e1.masks.steps == e2.masks.steps);
  const auto s1 = m.forward(x, ForwardMode::kSampled, 42);
  const auto s2 = m.forward(x, ForwardMode::kSampled, 42);
  const auto s3 = m.forward(x, ForwardMode::kSampled, 43);
  CHECK(s1.class_logits == s2.class_logits);
  CHECK(s1.masks.steps == s2.masks.steps);
  CHECK(s1.masks.steps != s3.masks.steps);
  for (const auto& step : s1.masks.steps) CheckRowsNormalized(step, 1e-6);
  for (const auto& step : e1.masks.steps) CheckRowsNormalized(step, 1e-6);
  for (const auto& p : e1.dists.probs) CheckRowsNormalized(p, 1e-6);
}

TEST_CASE("sample_mask limits and normalization") {
  Matrix peaked(1, 3);
  peaked(0, 0) = 10.0;
  const Matrix cold = sample_mask(peaked, 0.01, 0, /*deterministic=*/true);
  CHECK(cold(0, 0) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(cold(0, 1) <= 1e-4);

  const Matrix flat = sample_mask(Matrix(1, 3, 0.0), 1.0, 0, true);
  for (double v : flat.values()) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  CHECK_THROWS_AS(sample_mask(peaked, 0.0, 0), ConfigError);
  CHECK_THROWS_AS(sample_mask(peaked, -1.0, 0), ConfigError);

  const Matrix noisy = sample_mask(RandomInput(50, 7, 9), 0.5, 123);
  CheckRowsNormalized(noisy, 1e-6);
  CHECK(sample_mask(RandomInput(50, 7, 9), 0.5, 123) == noisy);
}

TEST_CASE("low temperature concentrates each sampled row") {
  const Matrix logits = RandomInput(200, 6, 21);
  const std::uint64_t seed = 5;
  // Recreate the noise the sampler draws for this seed.
  auto rng = noise_stream(seed);
  const Matrix g = gumbel_noise(logits.rows(), logits.cols(), rng);
  const Matrix m = sample_mask(logits, 0.01, seed);
  int checked = 0;
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    std::vector<double> z(logits.cols());
    for (std::size_t j = 0; j < z.size(); ++j) z[j] = logits(r, j) + g(r, j);
    std::vector<double> sorted = z;
    std::sort(sorted.rbegin(), sorted.rend());
    if (sorted[0] - sorted[1] <= 1.0) continue;
    ++checked;
    CHECK(*std::max_element(m.row(r).begin(), m.row(r).end()) >= 0.99);
  }
  CHECK(checked > 50);
}

TEST_CASE("feature permutation permutes mask columns at initialization") {
  ModelConfig c = Small(6, 3, 13);
  c.categorical_cardinalities = {0, 4, 0, 0, 3, 0};
  const Model m(c);
  Matrix x = RandomInput(12, 6, 14);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    x(r, 1) = static_cast<double>(r % 4);
    x(r, 4) = static_cast<double>(r % 3);
  }
  const std::vector<int> perm = {3, 0, 5, 1, 4, 2};
  const Model pm = m.permuted_features(perm);
  Matrix px(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t i = 0; i < perm.size(); ++i) px(r, i) = x(r, static_cast<std::size_t>(perm[i]));
  }
  const auto a = m.forward(x, ForwardMode::kExpected, 0);
  const auto b = pm.forward(px, ForwardMode::kExpected, 0);
  for (std::size_t k = 0; k < a.masks.n_steps(); ++k) {
    for (std::size_t r = 0; r < x.rows(); ++r) {
      for (std::size_t i = 0; i < perm.size(); ++i) {
        CHECK(b.masks.steps[k](r, i) ==
              doctest::Approx(a.masks.steps[k](r, static_cast<std::size_t>(perm[i]))).epsilon(1e-10));
      }
    }
  }
  for (std::size_t i = 0; i < a.class_logits.size(); ++i) {
    CHECK(b.class_logits.values()[i] == doctest::Approx(a.class_logits.values()[i]).epsilon(1e-10));
  }
  CHECK_THROWS(m.permuted_features(std::vector<int>{0, 0, 1, 2, 3, 4}));
}

TEST_CASE("prior scale mode keeps masks normalized") {
  ModelConfig c = Small(5, 3, 2);
  c.use_prior_scale = true;
  c.gamma = 1.3;
  const Model m(c);
  const auto out = m.forward(RandomInput(10, 5, 3), ForwardMode::kSampled, 4);
  for (const auto& step : out.masks.steps) CheckRowsNormalized(step, 1e-6);
}

}  // namespace itabnet
