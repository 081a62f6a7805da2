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
#include "itabnet/masks.hpp"
#include "test_support.hpp"

namespace itabnet {
namespace {

MaskTensor FromRows(const std::vector<std::vector<std::vector<double>>>& steps) {
  MaskTensor t;
  for (const auto& rows : steps) {
    Matrix m(rows.size(), rows[0].size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (std::size_t j = 0; j < rows[r].size(); ++j) m(r, j) = rows[r][j];
    }
    t.steps.push_back(m);
  }
  return t;
}

MaskTensor RandomMasks(std::size_t k, std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> e(1.0);
  MaskTensor t;
  for (std::size_t s = 0; s < k; ++s) {
    Matrix m(n, d);
    for (std::size_t r = 0; r < n; ++r) {
      double z = 0;
      for (std::size_t j = 0; j < d; ++j) z += (m(r, j) = e(rng));
      for (std::size_t j = 0; j < d; ++j) m(r, j) /= z;
    }
    t.steps.push_back(m);
  }
  return t;
}

std::vector<std::string> Names(std::size_t d) {
  std::vector<std::string> n;
  for (std::size_t j = 0; j < d; ++j) n.push_back("f" + std::to_string(j));
  return n;
}

}  // namespace

TEST_CASE("aggregated importance rows sum to one") {
  const MaskTensor m = RandomMasks(4, 30, 9, 1);
  const Matrix imp = aggregated_importance(m);
  REQUIRE(imp.rows() == 4);
  REQUIRE(imp.cols() == 9);
  for (std::size_t k = 0; k < 4; ++k) {
    double s = 0;
    for (double v : imp.row(k)) s += v;
    CHECK(std::abs(s - 1.0) <= 1e-6);
    double col0 = 0;
    for (std::size_t r = 0; r < 30; ++r) col0 += m.steps[k](r, 0);
    CHECK(imp(k, 0) == doctest::Approx(col0 / 30).epsilon(1e-9));
  }
  CHECK_THROWS_AS(aggregated_importance(MaskTensor{}), InputError);
}

TEST_CASE("salient feature policies") {
  const MaskTensor uniform = FromRows({{{0.25, 0.25, 0.25, 0.25}}});
  const SalientSummary top3 = salient_features(uniform, Names(4), SalientPolicy::top_k(3));
  REQUIRE(top3.per_step[0].size() == 3);
  CHECK(top3.per_step[0][0].index == 0);
  CHECK(top3.per_step[0][1].index == 1);
  CHECK(top3.per_step[0][2].index == 2);

  const MaskTensor graded = FromRows({{{0.5, 0.3, 0.2, 0.0}}});
  const SalientSummary floor = salient_features(graded, Names(4), SalientPolicy::floor_at(0.2));
  REQUIRE(floor.per_step[0].size() == 3);
  CHECK(floor.per_step[0][0].index == 0);
  CHECK(floor.per_step[0][2].index == 2);
  CHECK(floor.per_step[0][2].name == "f2");
  for (const auto& f : floor.per_step[0]) CHECK(f.importance >= 0.2);

  const SalientSummary capped = salient_features(graded, Names(4), SalientPolicy::floor_at(0.1, 2));
  CHECK(capped.per_step[0].size() == 2);
  CHECK(!SalientPolicy::standard().describe().empty());

  CHECK_THROWS_AS(salient_features(graded, Names(4), SalientPolicy::top_k(5)), ConfigError);
  CHECK_THROWS_AS(salient_features(graded, Names(4), SalientPolicy::floor_at(1.0)), ConfigError);
  CHECK_THROWS_AS(salient_features(graded, Names(3), SalientPolicy::top_k(1)), InputError);
}

TEST_CASE("salient features come out in descending order") {
  const MaskTensor m = FromRows({{{0.1, 0.4, 0.2, 0.3}}, {{0.3, 0.3, 0.1, 0.3}}});
  const SalientSummary s = salient_features(m, Names(4), SalientPolicy::top_k(4));
  CHECK(s.per_step[0][0].index == 1);
  CHECK(s.per_step[0][1].index == 3);
  CHECK(s.per_step[0][2].index == 2);
  CHECK(s.per_step[1][0].index == 0);
  CHECK(s.per_step[1][1].index == 1);
  CHECK(s.per_step[1][2].index == 3);
}

TEST_CASE("overlap matrix") {
  const MaskTensor same = FromRows({{{0.2, 0.8}}, {{0.2, 0.8}}});
  const Matrix a = overlap_matrix(same);
  CHECK(a(0, 1) == doctest::Approx(1.0));
  CHECK(a(1, 0) == doctest::Approx(1.0));

  const MaskTensor disjoint = FromRows({{{1, 0, 0}}, {{0, 1, 0}}, {{0, 0, 1}}});
  const Matrix b = overlap_matrix(disjoint);
  CHECK(b(0, 1) == 0.0);
  CHECK(b(2, 0) == 0.0);
  CHECK(mean_off_diagonal(b) == 0.0);

  // min(0.7, 0.2) + min(0.3, 0.3) + min(0, 0.5) = 0.5
  const MaskTensor hand = FromRows({{{0.7, 0.3, 0.0}}, {{0.2, 0.3, 0.5}}});
  CHECK(overlap_matrix(hand)(0, 1) == doctest::Approx(0.5).epsilon(1e-12));

  const Matrix r = overlap_matrix(RandomMasks(4, 25, 6, 3));
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(std::abs(r(i, i) - 1.0) <= 1e-5);
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(r(i, j) == r(j, i));
      CHECK(r(i, j) >= 0.0);
      CHECK(r(i, j) <= 1.0 + 1e-12);
    }
  }
  CHECK_THROWS_AS(overlap_matrix(FromRows({{{1.0}}})), ConfigError);
}

TEST_CASE("mask csv round trip") {
  testing::TempDir dir;
  const MaskTensor m = RandomMasks(3, 5, 4, 8);
  const auto names = std::vector<std::string>{"age", "work class", "sex", "hours"};
  const auto files = write_mask_csvs(m, names, dir.path());
  REQUIRE(files.size() == 3);
  CHECK(files[2].filename() == "mask_2.csv");
  const std::string text = testing::read_file(files[0]);
  CHECK(text.rfind("age,work class,sex,hours\n", 0) == 0);
  char cell[32];
  std::snprintf(cell, sizeof cell, "%.6f", m.steps[0](0, 0));
  CHECK(text.find(cell) != std::string::npos);
  const MaskCsvSet back = read_mask_csvs(dir.path());
  CHECK(back.feature_names == names);
  REQUIRE(back.masks.n_steps() == 3);
  CHECK(back.masks.steps[1](4, 3) == doctest::Approx(m.steps[1](4, 3)).epsilon(1e-6));
}

}  // namespace itabnet
