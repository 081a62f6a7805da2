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


#include <cmath>
#include <random>

#include "doctest.h"
#include "itabnet/errors.hpp"
#include "itabnet/synthetic.hpp"

namespace itabnet {
namespace {

// Independent restatement of the Syn1 label probability.
double Syn1Oracle(double x0, double x1) { return 1.0 / (1.0 + std::exp(x0 * x1)); }

}  // namespace

TEST_CASE("syn1 is a fair coin at the origin") {
  std::vector<double> x(11, 0.0);
  CHECK(syn_logit(SynKind::kSyn1, x) == 1.0);
  CHECK(syn_probability(SynKind::kSyn1, x) == 0.5);
}

TEST_CASE("switching datasets include the switch feature") {
  std::vector<double> x(11, 0.3);
  x[10] = -1.0;
  CHECK(syn_ground_truth(SynKind::kSyn4, x) == std::vector<int>{0, 1, 10});
  x[10] = 1.0;
  CHECK(syn_ground_truth(SynKind::kSyn4, x) == std::vector<int>{2, 3, 4, 5, 10});
  CHECK(syn_ground_truth(SynKind::kSyn5, x) == std::vector<int>{6, 7, 8, 9, 10});
  x[10] = -1.0;
  CHECK(syn_ground_truth(SynKind::kSyn6, x) == std::vector<int>{2, 3, 4, 5, 10});
  CHECK(syn_ground_truth(SynKind::kSyn3, x) == std::vector<int>{6, 7, 8, 9});
}

TEST_CASE("syn1 mean probability matches a Monte-Carlo oracle") {
  SyntheticSpec spec;
  spec.kind = SynKind::kSyn1;
  spec.n_train = 100000;
  spec.n_test = 10;
  spec.seed = 0;
  const SyntheticData data = generate_synthetic(spec);
  double generated = 0.0;
  double labels = 0.0;
  for (std::size_t r = 0; r < data.train.n_rows(); ++r) {
    generated += syn_probability(SynKind::kSyn1, data.train.X.row(r));
    labels += data.train.y[r];
  }
  generated /= static_cast<double>(spec.n_train);
  labels /= static_cast<double>(spec.n_train);

  // Oracle: fresh Box-Muller normals from an unrelated engine.
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double two_pi = 2.0 * std::acos(-1.0);
  double oracle = 0.0;
  const int n = 400000;
  for (int i = 0; i < n; ++i) {
    const double r = std::sqrt(-2.0 * std::log(1.0 - u(rng)));
    const double t = two_pi * u(rng);
    oracle += Syn1Oracle(r * std::cos(t), r * std::sin(t));
  }
  oracle /= n;
  CHECK(std::abs(generated - oracle) <= 0.005);
  CHECK(std::abs(labels - oracle) <= 0.005);
}

TEST_CASE("label probability ignores features outside the ground truth") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> d(0.0, 1.0);
  for (SynKind kind : {SynKind::kSyn1, SynKind::kSyn2, SynKind::kSyn3}) {
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> x(11);
      for (double& v : x) v = d(rng);
      const auto truth = syn_ground_truth(kind, x);
      const double p = syn_probability(kind, x);
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
      std::vector<double> y = x;
      for (int j = 0; j < 11; ++j) {
        if (std::find(truth.begin(), truth.end(), j) == truth.end()) y[j] = d(rng);
      }
      REQUIRE(syn_probability(kind, y) == p);
    }
  }
}

TEST_CASE("generation is seed-deterministic with the documented shape") {
  SyntheticSpec spec;
  spec.kind = SynKind::kSyn4;
  spec.n_train = 500;
  spec.n_test = 300;
  spec.seed = 9;
  const SyntheticData a = generate_synthetic(spec);
  const SyntheticData b = generate_synthetic(spec);
  CHECK(a.train.X == b.train.X);
  CHECK(a.test.y == b.test.y);
  CHECK(a.train.n_rows() == 500);
  CHECK(a.test.n_rows() == 300);
  CHECK(a.train.n_features() == 11);
  CHECK(a.train.feature_names.front() == "f0");
  CHECK(a.train.feature_names.back() == "f10");
  CHECK(a.train.target_name == "y");
  CHECK(a.test_ground_truth.size() == 300);
  spec.seed = 10;
  CHECK(generate_synthetic(spec).train.X != a.train.X);
}

TEST_CASE("synthetic spec validation") {
  CHECK_THROWS_AS(parse_syn_kind("syn9"), ConfigError);
  CHECK(parse_syn_kind("SYN3") == SynKind::kSyn3);
  SyntheticSpec spec;
  spec.dim = 12;
  CHECK_THROWS_AS(generate_synthetic(spec), ConfigError);
  spec.dim = 11;
  spec.n_test = 0;
  CHECK_THROWS_AS(generate_synthetic(spec), ConfigError);
}

}  // namespace itabnet
