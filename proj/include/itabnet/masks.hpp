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

#include <filesystem>
#include <string>
#include <vector>

#include "itabnet/matrix.hpp"
#include "itabnet/model.hpp"

namespace itabnet {

// K x D: per step, mean over samples of each feature's mask weight,
// renormalized to sum to 1. Throws InputError for an empty tensor.
Matrix aggregated_importance(const MaskTensor& masks);

struct SalientPolicy {
  enum class Kind { kTopK, kFloor };
  Kind kind = Kind::kFloor;
  int k = 0;         // top_k count
  double floor = 0;  // floor threshold
  int cap = 0;       // floor only: keep at most this many, 0 for no cap

  static SalientPolicy top_k(int k);
  static SalientPolicy floor_at(double t, int cap = 0);
  // floor(0.15) capped at 4 features per step.
  static SalientPolicy standard();

  std::string describe() const;
};

struct SalientFeature {
  int index = 0;
  std::string name;
  double importance = 0.0;
};

struct SalientSummary {
  std::vector<std::vector<SalientFeature>> per_step;  // descending importance
  std::string threshold_policy;
};

// Ties are broken by lower feature index. Throws ConfigError when k > D,
// k < 1, or the floor is outside [0, 1); InputError when names are missing.
SalientSummary salient_features(const MaskTensor& masks, const std::vector<std::string>& names,
                                const SalientPolicy& policy);
SalientSummary salient_from_importance(const Matrix& importance,
                                       const std::vector<std::string>& names,
                                       const SalientPolicy& policy);

// (i, j) = mean over samples of sum_d min(m_i[d], m_j[d]). Throws ConfigError
// for K < 2.
Matrix overlap_matrix(const MaskTensor& masks);
double mean_off_diagonal(const Matrix& square);

// mask_<k>.csv, header = feature names, 6-decimal fixed point.
std::vector<std::filesystem::path> write_mask_csvs(const MaskTensor& masks,
                                                   const std::vector<std::string>& names,
                                                   const std::filesystem::path& dir);

struct MaskCsvSet {
  MaskTensor masks;
  std::vector<std::string> feature_names;
};

// Reads mask_0.csv, mask_1.csv, ... until the next index is absent.
MaskCsvSet read_mask_csvs(const std::filesystem::path& dir);

}  // namespace itabnet
