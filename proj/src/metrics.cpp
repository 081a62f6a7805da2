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


#include "itabnet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "itabnet/errors.hpp"

namespace itabnet {

double accuracy(const Matrix& scores, std::span<const int> y) {
  if (scores.rows() != y.size()) throw ShapeError("score rows differ from label count");
  if (y.empty()) throw InputError("accuracy of an empty set");
  std::size_t correct = 0;
  for (std::size_t r = 0; r < scores.rows(); ++r) {
    const auto row = scores.row(r);
    const auto best = std::max_element(row.begin(), row.end()) - row.begin();
    if (best == y[r]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(y.size());
}

double roc_auc(std::span<const double> scores, std::span<const int> y) {
  if (scores.size() != y.size()) throw ShapeError("score count differs from label count");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double pos_rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // ranks i+1..j
    for (std::size_t t = i; t < j; ++t) {
      if (y[order[t]] == 1) {
        pos_rank_sum += avg_rank;
        ++n_pos;
      } else if (y[order[t]] != 0) {
        throw DataError("AUC needs labels in {0, 1}");
      }
    }
    i = j;
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) throw InputError("AUC needs both classes present");
  const double np = static_cast<double>(n_pos);
  return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

double mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double sample_std(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

}  // namespace itabnet
