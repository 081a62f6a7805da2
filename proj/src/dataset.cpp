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

#include "itabnet/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "itabnet/errors.hpp"

namespace itabnet {
namespace {

const std::string kEmpty;

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Whole-file RFC 4180 reader; quoted fields may contain commas, quotes and
// newlines. Blank lines are skipped.
std::vector<std::vector<std::string>> ParseCsv(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    if (record.empty() && !field_started && field.empty()) return;
    end_field();
    if (!(record.size() == 1 && record[0].empty())) records.push_back(std::move(record));
    record.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  end_record();
  return records;
}

std::optional<double> ParseReal(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  if (b == e) return std::nullopt;
  double v = 0.0;
  const char* first = s.data() + b;
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + e, v);
  if (ec != std::errc() || ptr != s.data() + e || !std::isfinite(v)) return std::nullopt;
  return v;
}

struct Header {
  std::vector<std::string> names;
  std::size_t target = 0;
};

Header ResolveHeader(const std::vector<std::string>& header, const std::string& target) {
  Header h;
  bool found = false;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (!seen.insert(header[i]).second) {
      throw SchemaError("duplicate column name: " + header[i]);
    }
    if (header[i] == target) {
      h.target = i;
      found = true;
    } else {
      h.names.push_back(header[i]);
    }
  }
  if (!found) throw SchemaError("target column not found: " + target);
  return h;
}

void EncodeLabels(const std::vector<std::string>& raw, Dataset& ds) {
  bool all_integer = true;
  for (const auto& r : raw) {
    auto v = ParseReal(r);
    if (!v || std::floor(*v) != *v) {
      all_integer = false;
      break;
    }
  }
  std::unordered_map<std::string, int> codes;
  if (all_integer) {
    std::map<double, std::string> ordered;
    for (const auto& r : raw) ordered.emplace(*ParseReal(r), r);
    std::map<double, int> by_value;
    for (const auto& [v, r] : ordered) {
      by_value[v] = static_cast<int>(ds.class_labels.size());
      ds.class_labels.push_back(r);
    }
    ds.y.reserve(raw.size());
    for (const auto& r : raw) ds.y.push_back(by_value.at(*ParseReal(r)));
    return;
  }
  ds.y.reserve(raw.size());
  for (const auto& r : raw) {
    auto [it, inserted] = codes.emplace(r, static_cast<int>(ds.class_labels.size()));
    if (inserted) ds.class_labels.push_back(r);
    ds.y.push_back(it->second);
  }
}

}  // namespace

int CategoricalMap::encode_or_insert(const std::string& raw) {
  if (raw.empty()) return -1;  // resolved to the missing token after ingest
  auto [it, inserted] = codes.emplace(raw, static_cast<int>(values.size()));
  if (inserted) values.push_back(raw);
  return it->second;
}

int CategoricalMap::encode(const std::string& raw) const {
  if (raw.empty()) return missing_token();
  auto it = codes.find(raw);
  return it == codes.end() ? missing_token() : it->second;
}

const std::string& CategoricalMap::decode(int code) const {
  if (code >= 0 && code < missing_token()) return values[static_cast<std::size_t>(code)];
  return kEmpty;
}

std::vector<int> Dataset::categorical_cardinalities() const {
  std::vector<int> out(n_features(), 0);
  for (std::size_t j = 0; j < categorical.size() && j < out.size(); ++j) {
    if (categorical[j]) out[j] = categorical[j]->cardinality();
  }
  return out;
}

void Dataset::validate() const {
  if (y.size() != X.rows()) throw DataError("label count differs from row count");
  if (feature_names.size() != X.cols()) throw DataError("feature name count mismatch");
  if (categorical.size() != X.cols()) throw DataError("categorical map count mismatch");
  std::set<std::string> names(feature_names.begin(), feature_names.end());
  if (names.size() != feature_names.size()) throw DataError("feature names not unique");
  for (int label : y) {
    if (label < 0 || label >= n_classes()) throw DataError("label out of range");
  }
  if (!X.all_finite()) throw DataError("feature matrix has non-finite entries");
}

Dataset load_csv(const std::filesystem::path& path, const std::string& target_column,
                 const std::vector<std::string>& categorical_columns) {
  const auto records = ParseCsv(ReadFile(path));
  if (records.empty()) throw InputError("empty input: " + path.string());
  const Header header = ResolveHeader(records[0], target_column);
  if (records.size() < 2) throw InputError("no data rows: " + path.string());

  for (const auto& c : categorical_columns) {
    if (std::find(header.names.begin(), header.names.end(), c) == header.names.end()) {
      throw SchemaError("categorical column not found: " + c);
    }
  }

  Dataset ds;
  ds.target_name = target_column;
  ds.feature_names = header.names;
  const std::size_t d = header.names.size();
  const std::size_t n = records.size() - 1;
  ds.categorical.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    if (std::find(categorical_columns.begin(), categorical_columns.end(),
                  header.names[j]) != categorical_columns.end()) {
      ds.categorical[j].emplace();
    }
  }

  ds.X = Matrix(n, d);
  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto& rec = records[r + 1];
    if (rec.size() != records[0].size()) {
      throw ParseError("row " + std::to_string(r + 1) + ": expected " +
                           std::to_string(records[0].size()) + " fields, got " +
                           std::to_string(rec.size()),
                       r + 1, "");
    }
    std::size_t j = 0;
    for (std::size_t c = 0; c < rec.size(); ++c) {
      if (c == header.target) {
        labels.push_back(rec[c]);
        continue;
      }
      if (ds.categorical[j]) {
        ds.X(r, j) = ds.categorical[j]->encode_or_insert(rec[c]);
      } else {
        auto v = ParseReal(rec[c]);
        if (!v) {
          throw ParseError("row " + std::to_string(r + 1) + ", column '" +
                               header.names[j] + "': not a number: '" + rec[c] + "'",
                           r + 1, header.names[j]);
        }
        ds.X(r, j) = *v;
      }
      ++j;
    }
  }
  // Missing cells were marked -1 while the code table was still growing.
  for (std::size_t j = 0; j < d; ++j) {
    if (!ds.categorical[j]) continue;
    const double token = ds.categorical[j]->missing_token();
    for (std::size_t r = 0; r < n; ++r) {
      if (ds.X(r, j) < 0) ds.X(r, j) = token;
    }
  }
  EncodeLabels(labels, ds);
  ds.validate();
  return ds;
}

Dataset load_csv_like(const std::filesystem::path& path, const Dataset& reference) {
  const auto records = ParseCsv(ReadFile(path));
  if (records.empty()) throw InputError("empty input: " + path.string());
  const Header header = ResolveHeader(records[0], reference.target_name);
  if (header.names != reference.feature_names) {
    throw SchemaError("columns of " + path.string() + " differ from the reference");
  }
  Dataset ds;
  ds.target_name = reference.target_name;
  ds.feature_names = reference.feature_names;
  ds.categorical = reference.categorical;
  ds.class_labels = reference.class_labels;
  const std::size_t n = records.size() - 1;
  const std::size_t d = ds.feature_names.size();
  ds.X = Matrix(n, d);
  ds.y.resize(n);
  std::unordered_map<std::string, int> label_codes;
  for (std::size_t i = 0; i < ds.class_labels.size(); ++i) {
    label_codes[ds.class_labels[i]] = static_cast<int>(i);
  }
  for (std::size_t r = 0; r < n; ++r) {
    const auto& rec = records[r + 1];
    if (rec.size() != records[0].size()) {
      throw ParseError("row " + std::to_string(r + 1) + ": wrong field count", r + 1, "");
    }
    std::size_t j = 0;
    for (std::size_t c = 0; c < rec.size(); ++c) {
      if (c == header.target) {
        auto it = label_codes.find(rec[c]);
        if (it == label_codes.end()) {
          // Integer labels may be spelled differently ("1" vs "1.0").
          auto v = ParseReal(rec[c]);
          bool matched = false;
          if (v) {
            for (std::size_t k = 0; k < ds.class_labels.size(); ++k) {
              auto ref = ParseReal(ds.class_labels[k]);
              if (ref && *ref == *v) {
                ds.y[r] = static_cast<int>(k);
                matched = true;
                break;
              }
            }
          }
          if (!matched) throw DataError("unseen label '" + rec[c] + "' in " + path.string());
        } else {
          ds.y[r] = it->second;
        }
        continue;
      }
      if (ds.categorical[j]) {
        ds.X(r, j) = ds.categorical[j]->encode(rec[c]);
      } else {
        auto v = ParseReal(rec[c]);
        if (!v) {
          throw ParseError("row " + std::to_string(r + 1) + ", column '" +
                               ds.feature_names[j] + "': not a number: '" + rec[c] + "'",
                           r + 1, ds.feature_names[j]);
        }
        ds.X(r, j) = *v;
      }
      ++j;
    }
  }
  ds.validate();
  return ds;
}

namespace {

std::string Quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

void write_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& name : ds.feature_names) out << Quote(name) << ',';
  out << Quote(ds.target_name) << '\n';
  char buf[40];
  for (std::size_t r = 0; r < ds.n_rows(); ++r) {
    for (std::size_t j = 0; j < ds.n_features(); ++j) {
      if (ds.categorical[j]) {
        out << Quote(ds.categorical[j]->decode(static_cast<int>(ds.X(r, j))));
      } else {
        std::snprintf(buf, sizeof(buf), "%.17g", ds.X(r, j));
        out << buf;
      }
      out << ',';
    }
    out << Quote(ds.class_labels[static_cast<std::size_t>(ds.y[r])]) << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

void SplitSpec::validate() const {
  for (double f : {train_frac, val_frac, test_frac}) {
    if (!(f > 0.0 && f < 1.0)) throw ConfigError("split fractions must lie in (0, 1)");
  }
  if (std::abs(train_frac + val_frac + test_frac - 1.0) > 1e-9) {
    throw ConfigError("split fractions must sum to 1");
  }
}

SplitIndices split_indices(std::size_t n, const SplitSpec& spec) {
  spec.validate();
  if (n < 10) throw InputError("split needs at least 10 rows");
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(spec.seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i);
    std::swap(order[i], order[pick(rng)]);
  }
  // Small epsilon so exact fractions like 0.1 * 10 do not floor to 0.
  const auto take = [n](double frac) {
    return static_cast<std::size_t>(std::floor(frac * static_cast<double>(n) + 1e-9));
  };
  const std::size_t n_val = take(spec.val_frac);
  const std::size_t n_test = take(spec.test_frac);
  const std::size_t n_train = n - n_val - n_test;
  SplitIndices out;
  out.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.val.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                 order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  out.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), order.end());
  return out;
}

Dataset subset(const Dataset& ds, const std::vector<std::size_t>& rows) {
  Dataset out;
  out.X = gather_rows(ds.X, rows);
  out.y.reserve(rows.size());
  for (std::size_t r : rows) out.y.push_back(ds.y[r]);
  out.feature_names = ds.feature_names;
  out.categorical = ds.categorical;
  out.class_labels = ds.class_labels;
  out.target_name = ds.target_name;
  return out;
}

SplitDatasets split(const Dataset& ds, const SplitSpec& spec) {
  const SplitIndices idx = split_indices(ds.n_rows(), spec);
  return {subset(ds, idx.train), subset(ds, idx.val), subset(ds, idx.test)};
}

std::vector<std::string> parse_csv_line(const std::string& line) {
  auto records = ParseCsv(line);
  if (records.empty()) return {};
  return records[0];
}

}  // namespace itabnet
