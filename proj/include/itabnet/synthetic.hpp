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

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "itabnet/dataset.hpp"

namespace itabnet {

// Instance-wise feature selection benchmarks over an 11-dimensional standard
// normal input with P(Y=1|X) = 1 / (1 + logit(X)).
//
//   Syn1: exp(x[a0] * x[a1])
//   Syn2: exp(sum of x[b]^2 over b in B - 4)
//   Syn3: exp(-10 sin(2 x[c0]) + 2 |x[c1]| + x[c2] + exp(-x[c3]))
//   Syn4: Syn1 if x[s] < 0 else Syn2
//   Syn5: Syn1 if x[s] < 0 else Syn3
//   Syn6: Syn2 if x[s] < 0 else Syn3
enum class SynKind { kSyn1 = 1, kSyn2, kSyn3, kSyn4, kSyn5, kSyn6 };

// Throws ConfigError for anything but "syn1".."syn6" (case-insensitive).
SynKind parse_syn_kind(const std::string& name);
std::string syn_kind_name(SynKind kind);

// Which columns each component reads.
struct SynFeatureLayout {
  std::array<int, 2> syn1{0, 1};
  std::array<int, 4> syn2{2, 3, 4, 5};
  std::array<int, 4> syn3{6, 7, 8, 9};
  int switch_feature = 10;
};

struct SyntheticSpec {
  SynKind kind = SynKind::kSyn1;
  std::size_t n_train = 10000;
  std::size_t n_test = 10000;
  std::uint64_t seed = 0;
  std::size_t dim = 11;
  SynFeatureLayout layout;

  void validate() const;
};

// The generator's logit(X) and label probability for one row.
double syn_logit(SynKind kind, std::span<const double> x, const SynFeatureLayout& layout = {});
double syn_probability(SynKind kind, std::span<const double> x,
                       const SynFeatureLayout& layout = {});
// Sorted relevant feature indices for one row.
std::vector<int> syn_ground_truth(SynKind kind, std::span<const double> x,
                                  const SynFeatureLayout& layout = {});

struct SyntheticData {
  Dataset train;
  Dataset test;
  std::vector<std::vector<int>> train_ground_truth;
  std::vector<std::vector<int>> test_ground_truth;
};

// Features are named f0..f10, the target column is "y" with labels "0"/"1".
SyntheticData generate_synthetic(const SyntheticSpec& spec);

}  // namespace itabnet
