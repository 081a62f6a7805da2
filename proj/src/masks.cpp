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


#include "itabnet/masks.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "itabnet/dataset.hpp"
#include "itabnet/errors.hpp"

namespace itabnet {
namespace {

void CheckMasks(const MaskTensor& masks) {
  if (masks.empty()) throw InputError("empty mask tensor");
  for (const auto& s : masks.steps) {
    if (s.rows() != masks.n_samples() || s.cols() != masks.n_features()) {
      throw ShapeError("mask steps disagree in shape");
    }
  }
}

std::string FormatDouble(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

}  // namespace

Matrix aggregated_importance(const MaskTensor& masks) {
  CheckMasks(masks);
  const std::size_t k = masks.n_steps(), n = masks.n_samples(), d = masks.n_features();
  Matrix imp(k, d);
  for (std::size_t s = 0; s < k; ++s) {
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t j = 0; j < d; ++j) imp(s, j) += masks.steps[s](r, j);
    }
    double total = 0.0;
    for (std::size_t j = 0; j < d; ++j) total += imp(s, j);
    for (std::size_t j = 0; j < d; ++j) {
      imp(s, j) = total > 0.0 ? imp(s, j) / total : 1.0 / static_cast<double>(d);
    }
  }
  return imp;
}

SalientPolicy SalientPolicy::top_k(int k) {
  SalientPolicy p;
  p.kind = Kind::kTopK;
  p.k = k;
  return p;
}

SalientPolicy SalientPolicy::floor_at(double t, int cap) {
  SalientPolicy p;
  p.kind = Kind::kFloor;
  p.floor = t;
  p.cap = cap;
  return p;
}

SalientPolicy SalientPolicy::standard() { return floor_at(0.15, 4); }

std::string SalientPolicy::describe() const {
  if (kind == Kind::kTopK) return "top_k(" + std::to_string(k) + ")";
  std::string s = "floor(" + FormatDouble("%g", floor) + ")";
  if (cap > 0) s += " capped at " + std::to_string(cap);
  return s;
}

SalientSummary salient_from_importance(const Matrix& importance,
                                       const std::vector<std::string>& names,
                                       const SalientPolicy& policy) {
  const std::size_t d = importance.cols();
  if (names.size() != d) throw InputError("one feature name per mask column is required");
  if (policy.kind == SalientPolicy::Kind::kTopK) {
    if (policy.k < 1 || static_cast<std::size_t>(policy.k) > d) {
      throw ConfigError("top_k must be between 1 and the feature count");
    }
  } else if (!(policy.floor >= 0.0 && policy.floor < 1.0) || policy.cap < 0) {
    throw ConfigError("salience floor must lie in [0, 1)");
  }
  SalientSummary out;
  out.threshold_policy = policy.describe();
  for (std::size_t s = 0; s < importance.rows(); ++s) {
    std::vector<int> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return importance(s, static_cast<std::size_t>(a)) > importance(s, static_cast<std::size_t>(b));
    });
    std::vector<SalientFeature> step;
    for (int j : order) {
      const double v = importance(s, static_cast<std::size_t>(j));
      if (policy.kind == SalientPolicy::Kind::kTopK) {
        if (static_cast<int>(step.size()) >= policy.k) break;
      } else {
        if (v < policy.floor - 1e-12) break;
        if (policy.cap > 0 && static_cast<int>(step.size()) >= policy.cap) break;
      }
      step.push_back({j, names[static_cast<std::size_t>(j)], v});
    }
    out.per_step.push_back(std::move(step));
  }
  return out;
}

SalientSummary salient_features(const MaskTensor& masks, const std::vector<std::string>& names,
                                const SalientPolicy& policy) {
  return salient_from_importance(aggregated_importance(masks), names, policy);
}

Matrix overlap_matrix(const MaskTensor& masks) {
  CheckMasks(masks);
  const std::size_t k = masks.n_steps(), n = masks.n_samples(), d = masks.n_features();
  if (k < 2) throw ConfigError("overlap needs at least 2 steps");
  Matrix out(k, k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i; j < k; ++j) {
      double sum = 0.0;
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < d; ++c) {
          sum += std::min(masks.steps[i](r, c), masks.steps[j](r, c));
        }
      }
      out(i, j) = out(j, i) = sum / static_cast<double>(n);
    }
  }
  return out;
}

double mean_off_diagonal(const Matrix& square) {
  const std::size_t k = square.rows();
  if (k < 2 || square.cols() != k) throw ShapeError("need a square matrix of size >= 2");
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (i != j) sum += square(i, j);
    }
  }
  return sum / static_cast<double>(k * (k - 1));
}

std::vector<std::filesystem::path> write_mask_csvs(const MaskTensor& masks,
                                                   const std::vector<std::string>& names,
                                                   const std::filesystem::path& dir) {
  CheckMasks(masks);
  if (names.size() != masks.n_features()) {
    throw InputError("one feature name per mask column is required");
  }
  std::vector<std::filesystem::path> paths;
  for (std::size_t k = 0; k < masks.n_steps(); ++k) {
    const auto path = dir / ("mask_" + std::to_string(k) + ".csv");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    for (std::size_t j = 0; j < names.size(); ++j) {
      if (j) out << ',';
      out << names[j];
    }
    out << '\n';
    const Matrix& m = masks.steps[k];
    char buf[32];
    for (std::size_t r = 0; r < m.rows(); ++r) {
      for (std::size_t j = 0; j < m.cols(); ++j) {
        std::snprintf(buf, sizeof(buf), "%.6f", m(r, j));
        if (j) out << ',';
        out << buf;
      }
      out << '\n';
    }
    if (!out) throw IoError("failed writing " + path.string());
    paths.push_back(path);
  }
  return paths;
}

MaskCsvSet read_mask_csvs(const std::filesystem::path& dir) {
  MaskCsvSet set;
  for (std::size_t k = 0;; ++k) {
    const auto path = dir / ("mask_" + std::to_string(k) + ".csv");
    if (!std::filesystem::exists(path)) break;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw InputError(path.string() + " is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto header = parse_csv_line(line);
    if (k == 0) {
      set.feature_names = header;
    } else if (header != set.feature_names) {
      throw SchemaError(path.string() + " has a different header than mask_0.csv");
    }
    std::vector<double> values;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      const auto fields = parse_csv_line(line);
      if (fields.size() != header.size()) {
        throw ParseError(path.string() + ": wrong field count", rows + 1, "");
      }
      for (std::size_t j = 0; j < fields.size(); ++j) {
        try {
          std::size_t used = 0;
          values.push_back(std::stod(fields[j], &used));
          if (used != fields[j].size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
          throw ParseError(path.string() + ": not a number", rows + 1, header[j]);
        }
      }
      ++rows;
    }
    Matrix m(rows, header.size());
    std::copy(values.begin(), values.end(), m.data());
    if (k > 0 && rows != set.masks.n_samples()) {
      throw ShapeError(path.string() + " has a different row count");
    }
    set.masks.steps.push_back(std::move(m));
  }
  if (set.masks.steps.empty()) throw InputError("no mask_<k>.csv files in " + dir.string());
  return set;
}

}  // namespace itabnet
