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
#include <set>

#include "doctest.h"
#include "itabnet/dataset.hpp"
#include "itabnet/errors.hpp"
#include "test_support.hpp"

namespace itabnet {
namespace {

using testing::TempDir;
using testing::write_file;

const std::vector<std::string> kAdultCategorical = {
    "workclass", "education", "marital-status", "occupation",
    "relationship", "race", "sex", "native-country"};

Dataset Numbered(std::size_t n) {
  Dataset ds;
  ds.X = Matrix(n, 1);
  for (std::size_t i = 0; i < n; ++i) ds.X(i, 0) = static_cast<double>(i);
  ds.y.assign(n, 0);
  ds.feature_names = {"id"};
  ds.categorical.resize(1);
  ds.class_labels = {"0", "1"};
  return ds;
}

}  // namespace

TEST_CASE("categorical codes follow first-seen order") {
  TempDir dir;
  write_file(dir / "t.csv", "c,x,label\na,1.5,yes\nb,2,no\na,-3,yes\n");
  const Dataset ds = load_csv(dir / "t.csv", "label", {"c"});
  REQUIRE(ds.n_rows() == 3);
  REQUIRE(ds.n_features() == 2);
  CHECK(ds.X(0, 0) == 0.0);
  CHECK(ds.X(1, 0) == 1.0);
  CHECK(ds.X(2, 0) == 0.0);
  CHECK(ds.X(2, 1) == -3.0);
  CHECK(ds.class_labels == std::vector<std::string>{"yes", "no"});
  CHECK(ds.y == std::vector<int>{0, 1, 0});
  CHECK(ds.task() == Task::kBinary);
}

TEST_CASE("absent categorical cells take the missing token") {
  TempDir dir;
  write_file(dir / "t.csv", "c,y\na,0\n,1\nb,0\n");
  const Dataset ds = load_csv(dir / "t.csv", "y", {"c"});
  // Observed values get codes 0 and 1, so the missing token is 2.
  CHECK(ds.X(0, 0) == 0.0);
  CHECK(ds.X(1, 0) == 2.0);
  CHECK(ds.X(2, 0) == 1.0);
  const CategoricalMap& m = *ds.categorical[0];
  CHECK(m.missing_token() == 2);
  CHECK(m.cardinality() == 3);
  CHECK(m.encode("never seen") == 2);
  CHECK(m.decode(2).empty());
}

TEST_CASE("encoding is a bijection onto 0..V") {
  TempDir dir;
  write_file(dir / "t.csv", "c,y\nq,0\nr,1\n,0\nq,1\ns,0\n\"r\",1\n");
  const Dataset ds = load_csv(dir / "t.csv", "y", {"c"});
  const CategoricalMap& m = *ds.categorical[0];
  std::set<int> codes;
  for (const auto& v : m.values) codes.insert(m.encode(v));
  codes.insert(m.missing_token());
  CHECK(codes.size() == m.values.size() + 1);
  CHECK(*codes.begin() == 0);
  CHECK(*codes.rbegin() == static_cast<int>(m.values.size()));
  for (std::size_t r = 0; r < ds.n_rows(); ++r) {
    const int code = static_cast<int>(ds.X(r, 0));
    CHECK(m.encode(m.decode(code)) == code);
  }
}

TEST_CASE("integer labels densify in numeric order") {
  TempDir dir;
  write_file(dir / "t.csv", "x,y\n1,7\n2,3\n3,5\n4,3\n");
  const Dataset ds = load_csv(dir / "t.csv", "y", {});
  CHECK(ds.class_labels == std::vector<std::string>{"3", "5", "7"});
  CHECK(ds.y == std::vector<int>{2, 0, 1, 0});
  CHECK(ds.task() == Task::kMulticlass);
}

TEST_CASE("load_csv error classes") {
  TempDir dir;
  write_file(dir / "a.csv", "x,z\n1,2\n");
  CHECK_THROWS_AS(load_csv(dir / "a.csv", "y", {}), SchemaError);
  write_file(dir / "b.csv", "x,y\n1,0\nabc,1\n");
  try {
    load_csv(dir / "b.csv", "y", {});
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.row() == 2);
    CHECK(e.column() == "x");
  }
  write_file(dir / "c.csv", "");
  CHECK_THROWS_AS(load_csv(dir / "c.csv", "y", {}), InputError);
  CHECK_THROWS(load_csv(dir / "missing.csv", "y", {}));
}

TEST_CASE("csv round trip keeps raw strings") {
  TempDir dir;
  write_file(dir / "t.csv", "c,x,y\n\"a,b\",1,0\nplain,2.5,1\n,3,0\n");
  const Dataset ds = load_csv(dir / "t.csv", "y", {"c"});
  write_csv(ds, dir / "out.csv");
  const Dataset again = load_csv(dir / "out.csv", "y", {"c"});
  CHECK(again.X == ds.X);
  CHECK(again.y == ds.y);
  CHECK(again.categorical[0]->values == ds.categorical[0]->values);
  CHECK(parse_csv_line("\"a,b\",\"say \"\"hi\"\"\",3") ==
        std::vector<std::string>{"a,b", "say \"hi\"", "3"});
}

TEST_CASE("load_csv_like reuses the reference encoding") {
  TempDir dir;
  write_file(dir / "train.csv", "c,y\na,0\nb,1\n");
  write_file(dir / "test.csv", "c,y\nb,1\nz,0\n");
  const Dataset train = load_csv(dir / "train.csv", "y", {"c"});
  const Dataset test = load_csv_like(dir / "test.csv", train);
  CHECK(test.X(0, 0) == 1.0);
  CHECK(test.X(1, 0) == 2.0);  // unseen category -> missing token
  write_file(dir / "bad.csv", "c,y\na,9\n");
  CHECK_THROWS_AS(load_csv_like(dir / "bad.csv", train), DataError);
}

TEST_CASE("split sizes, determinism and disjointness") {
  const SplitSpec spec;
  const SplitIndices small = split_indices(10, spec);
  CHECK(small.train.size() == 8);
  CHECK(small.val.size() == 1);
  CHECK(small.test.size() == 1);

  // floor(0.1 * 32560) = 3256 for val and test; train takes the rest.
  const std::size_t n = 32560;
  const auto expect_val = static_cast<std::size_t>(std::floor(0.1 * n + 1e-9));
  const SplitIndices big = split_indices(n, spec);
  CHECK(big.val.size() == expect_val);
  CHECK(big.test.size() == expect_val);
  CHECK(big.train.size() == n - 2 * expect_val);
  CHECK(big.train.size() == 26048);

  std::vector<std::size_t> all = big.train;
  all.insert(all.end(), big.val.begin(), big.val.end());
  all.insert(all.end(), big.test.begin(), big.test.end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < n; ++i) REQUIRE(all[i] == i);

  const SplitIndices again = split_indices(n, spec);
  CHECK(again.train == big.train);
  CHECK(again.test == big.test);
  SplitSpec other = spec;
  other.seed = 1;
  CHECK(split_indices(n, other).train != big.train);

  const SplitDatasets parts = split(Numbered(20), spec);
  CHECK(parts.train.n_rows() == 16);
  CHECK(parts.val.X(0, 0) == static_cast<double>(split_indices(20, spec).val[0]));
}

TEST_CASE("split rejects bad fractions and tiny inputs") {
  SplitSpec bad;
  bad.test_frac = 0.2;
  CHECK_THROWS_AS(split_indices(100, bad), ConfigError);
  CHECK_THROWS_AS(split_indices(9, SplitSpec{}), InputError);
}

TEST_CASE("adult table loads with the expected shape") {
  const std::filesystem::path path = std::filesystem::path(ITABNET_DATA_DIR) / "adult.csv";
  if (!std::filesystem::exists(path)) {
    MESSAGE("adult.csv not present; run tools/prepare_adult.py");
    return;
  }
  const Dataset ds = load_csv(path, "income", kAdultCategorical);
  CHECK(ds.n_rows() == 32560);
  CHECK(ds.n_features() == 14);
  int n_cat = 0;
  for (const auto& c : ds.categorical) n_cat += c.has_value() ? 1 : 0;
  CHECK(n_cat == 8);
  CHECK(ds.n_classes() == 2);
  CHECK_NOTHROW(ds.validate());
  const SplitDatasets parts = split(ds, SplitSpec{});
  CHECK(parts.train.n_rows() == 26048);
  CHECK(parts.val.n_rows() == 3256);
  CHECK(parts.test.n_rows() == 3256);
}

}  // namespace itabnet
