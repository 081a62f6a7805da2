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

#include "itabnet/synthetic.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>

#include "itabnet/errors.hpp"

namespace itabnet {
namespace {

double Syn1Logit(std::span<const double> x, const SynFeatureLayout& l) {
  return std::exp(x[l.syn1[0]] * x[l.syn1[1]]);
}

double Syn2Logit(std::span<const double> x, const SynFeatureLayout& l) {
  double s = 0.0;
  for (int j : l.syn2) s += x[j] * x[j];
  return std::exp(s - 4.0);
}

double Syn3Logit(std::span<const double> x, const SynFeatureLayout& l) {
  const auto& c = l.syn3;
  return std::exp(-10.0 * std::sin(2.0 * x[c[0]]) + 2.0 * std::abs(x[c[1]]) + x[c[2]] +
                  std::exp(-x[c[3]]));
}

void Append(std::vector<int>& out, std::span<const int> idx) {
  out.insert(out.end(), idx.begin(), idx.end());
}

Dataset MakeDataset(std::size_t n, std::size_t dim) {
  Dataset ds;
  ds.X = Matrix(n, dim);
  ds.y.assign(n, 0);
  for (std::size_t j = 0; j < dim; ++j) ds.feature_names.push_back("f" + std::to_string(j));
  ds.categorical.resize(dim);
  ds.class_labels = {"0", "1"};
  ds.target_name = "y";
  return ds;
}

void Fill(const SyntheticSpec& spec, std::uint64_t stream, Dataset& ds,
          std::vector<std::vector<int>>& truth) {
  std::seed_seq seq{static_cast<std::uint32_t>(spec.seed),
                    static_cast<std::uint32_t>(spec.seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  truth.resize(ds.n_rows());
  for (std::size_t r = 0; r < ds.n_rows(); ++r) {
    auto row = ds.X.row(r);
    for (double& v : row) v = normal(rng);
    const double p = syn_probability(spec.kind, row, spec.layout);
    ds.y[r] = uniform(rng) < p ? 1 : 0;
    truth[r] = syn_ground_truth(spec.kind, row, spec.layout);
  }
}

}  // namespace

SynKind parse_syn_kind(const std::string& name) {
  std::string lower;
  for (char c : name) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower.size() == 4 && lower.rfind("syn", 0) == 0 && lower[3] >= '1' && lower[3] <= '6') {
    return static_cast<SynKind>(lower[3] - '0');
  }
  throw ConfigError("unknown synthetic dataset kind: '" + name + "' (expected syn1..syn6)");
}

std::string syn_kind_name(SynKind kind) {
  return "syn" + std::to_string(static_cast<int>(kind));
}

void SyntheticSpec::validate() const {
  if (dim != 11) throw ConfigError("synthetic datasets are 11-dimensional");
  if (n_train == 0 || n_test == 0) throw ConfigError("synthetic sample counts must be positive");
  const int k = static_cast<int>(kind);
  if (k < 1 || k > 6) throw ConfigError("unknown synthetic dataset kind");
  auto in_range = [this](int j) { return j >= 0 && j < static_cast<int>(dim); };
  bool ok = in_range(layout.switch_feature);
  for (int j : layout.syn1) ok = ok && in_range(j);
  for (int j : layout.syn2) ok = ok && in_range(j);
  for (int j : layout.syn3) ok = ok && in_range(j);
  if (!ok) throw ConfigError("synthetic feature layout index out of range");
}

double syn_logit(SynKind kind, std::span<const double> x, const SynFeatureLayout& layout) {
  if (x.size() < 11) throw ShapeError("synthetic rows have 11 features");
  const bool low = x[layout.switch_feature] < 0.0;
  switch (kind) {
    case SynKind::kSyn1:
      return Syn1Logit(x, layout);
    case SynKind::kSyn2:
      return Syn2Logit(x, layout);
    case SynKind::kSyn3:
      return Syn3Logit(x, layout);
    case SynKind::kSyn4:
      return low ? Syn1Logit(x, layout) : Syn2Logit(x, layout);
    case SynKind::kSyn5:
      return low ? Syn1Logit(x, layout) : Syn3Logit(x, layout);
    case SynKind::kSyn6:
      return low ? Syn2Logit(x, layout) : Syn3Logit(x, layout);
  }
  throw ConfigError("unknown synthetic dataset kind");
}

double syn_probability(SynKind kind, std::span<const double> x, const SynFeatureLayout& layout) {
  return 1.0 / (1.0 + syn_logit(kind, x, layout));
}

std::vector<int> syn_ground_truth(SynKind kind, std::span<const double> x,
                                  const SynFeatureLayout& layout) {
  std::vector<int> out;
  const bool low = x[layout.switch_feature] < 0.0;
  switch (kind) {
    case SynKind::kSyn1:
      Append(out, layout.syn1);
      break;
    case SynKind::kSyn2:
      Append(out, layout.syn2);
      break;
    case SynKind::kSyn3:
      Append(out, layout.syn3);
      break;
    case SynKind::kSyn4:
      low ? Append(out, layout.syn1) : Append(out, layout.syn2);
      break;
    case SynKind::kSyn5:
      low ? Append(out, layout.syn1) : Append(out, layout.syn3);
      break;
    case SynKind::kSyn6:
      low ? Append(out, layout.syn2) : Append(out, layout.syn3);
      break;
  }
  if (static_cast<int>(kind) >= 4) out.push_back(layout.switch_feature);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  SyntheticData data;
  data.train = MakeDataset(spec.n_train, spec.dim);
  data.test = MakeDataset(spec.n_test, spec.dim);
  Fill(spec, 0, data.train, data.train_ground_truth);
  Fill(spec, 1, data.test, data.test_ground_truth);
  return data;
}

}  // namespace itabnet
