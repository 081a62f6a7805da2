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
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "itabnet/matrix.hpp"

namespace itabnet {

enum class Task { kBinary, kMulticlass };

// Label encoding of one categorical column. Codes follow first-seen order;
// the missing token is always reserved as code values.size().
struct CategoricalMap {
  std::vector<std::string> values;
  std::unordered_map<std::string, int> codes;

  int missing_token() const { return static_cast<int>(values.size()); }
  // values.size() + 1, counting the missing token.
  int cardinality() const { return missing_token() + 1; }

  // Adds the value if unseen. Empty strings map to the missing token.
  int encode_or_insert(const std::string& raw);
  // Unseen values and empty strings map to the missing token.
  int encode(const std::string& raw) const;
  // Empty string for the missing token.
  const std::string& decode(int code) const;
};

struct Dataset {
  Matrix X;
  std::vector<int> y;
  std::vector<std::string> feature_names;
  // One entry per feature; nullopt for numeric columns.
  std::vector<std::optional<CategoricalMap>> categorical;
  // Raw label for each class code.
  std::vector<std::string> class_labels;
  std::string target_name = "y";

  std::size_t n_rows() const { return X.rows(); }
  std::size_t n_features() const { return X.cols(); }
  int n_classes() const { return static_cast<int>(class_labels.size()); }
  Task task() const { return n_classes() <= 2 ? Task::kBinary : Task::kMulticlass; }

  // 0 for numeric features, cardinality for categorical ones.
  std::vector<int> categorical_cardinalities() const;

  // Checks the invariants listed for the type; throws DataError.
  void validate() const;
};

// Header required, comma-delimited, RFC 4180 quoting. Categorical columns are
// label-encoded in first-seen order with empty cells mapped to the missing
// token. Integer-valued labels are densified in ascending numeric order,
// other labels in first-seen order.
Dataset load_csv(const std::filesystem::path& path, const std::string& target_column,
                 const std::vector<std::string>& categorical_columns);

// Same columns as `reference`, encoded with its maps. Unseen categories map to
// the missing token; unseen labels are a DataError.
Dataset load_csv_like(const std::filesystem::path& path, const Dataset& reference);

// Raw categorical strings and labels are written back out.
void write_csv(const Dataset& ds, const std::filesystem::path& path);

struct SplitSpec {
  double train_frac = 0.8;
  double val_frac = 0.1;
  double test_frac = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SplitIndices {
  std::vector<std::size_t> train, val, test;
};

// Seeded shuffle; val and test take floor(frac * N) rows, train the rest.
SplitIndices split_indices(std::size_t n, const SplitSpec& spec);

struct SplitDatasets {
  Dataset train, val, test;
};

SplitDatasets split(const Dataset& ds, const SplitSpec& spec);

Dataset subset(const Dataset& ds, const std::vector<std::size_t>& rows);

// Split a single CSV line into fields (exposed for tests).
std::vector<std::string> parse_csv_line(const std::string& line);

}  // namespace itabnet
