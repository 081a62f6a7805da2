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


#include <map>

#include "doctest.h"
#include "itabnet/errors.hpp"
#include "itabnet/rm_search.hpp"
#include "json.hpp"

namespace itabnet {
namespace {

// One-sample, K-step masks with the given per-feature importances.
MaskTensor Masks(const std::vector<double>& row, int k = 4) {
  Matrix m(1, row.size());
  for (std::size_t j = 0; j < row.size(); ++j) m(0, j) = row[j];
  MaskTensor t;
  t.steps.assign(static_cast<std::size_t>(k), m);
  return t;
}

MaskTensor Passing() {
  // Three features in [0.20, 0.25], the other eleven share 0.34.
  std::vector<double> row(14, 0.34 / 11);
  row[0] = 0.23;
  row[1] = 0.22;
  row[2] = 0.21;
  return Masks(row);
}

MaskTensor Failing() { return Masks(std::vector<double>(14, 1.0 / 14)); }

struct Script {
  std::map<double, std::pair<double, bool>> table;
  std::vector<double> calls;

  TrainerHandle handle() {
    return [this](double r_m, std::uint64_t) {
      calls.push_back(r_m);
      const auto it = table.find(r_m);
      REQUIRE(it != table.end());
      return TrialOutcome{it->second.first, it->second.second ? Passing() : Failing()};
    };
  }
};

}  // namespace

TEST_CASE("criteria examples") {
  const CriteriaConfig cfg;
  const CriteriaResult pass = criteria_check(Passing(), cfg);
  CHECK(pass.pass);
  CHECK(pass.steps[0].in_band == 3);
  CHECK(pass.steps[0].above_floor == 3);

  const CriteriaResult uniform = criteria_check(Failing(), cfg);
  CHECK_FALSE(uniform.pass);
  CHECK(uniform.steps[0].in_band == 0);

  std::vector<double> hot(14, 0.0);
  hot[5] = 1.0;
  const CriteriaResult one_hot = criteria_check(Masks(hot), cfg);
  CHECK_FALSE(one_hot.pass);
  CHECK(one_hot.steps[0].in_band == 0);

  // One good step is not enough.
  MaskTensor mixed = Passing();
  mixed.steps[2] = Failing().steps[0];
  const CriteriaResult partial = criteria_check(mixed, cfg);
  CHECK_FALSE(partial.pass);
  CHECK(partial.steps[0].pass);
  CHECK_FALSE(partial.steps[2].pass);

  CHECK_THROWS_AS(criteria_check(MaskTensor{}, cfg), InputError);
}

TEST_CASE("multiplicative candidates and call bound") {
  CHECK(multiplicative_candidates(0, 1e7) ==
        std::vector<double>{0, 10, 100, 1e3, 1e4, 1e5, 1e6, 1e7});
  CHECK(multiplicative_candidates(5, 600) == std::vector<double>{5, 50, 500});
  CHECK_THROWS_AS(multiplicative_candidates(10, 1), ConfigError);
  CriteriaConfig cfg;
  CHECK(max_trainer_calls(cfg) == 8 + 9);
  cfg.recursion = false;
  CHECK(max_trainer_calls(cfg) == 8);
  cfg.range_start = 20;
  cfg.range_end = 10;
  Script s;
  CHECK_THROWS_AS(search_rm(s.handle(), cfg), ConfigError);
}

TEST_CASE("pass-rich trace stops at the third passing candidate") {
  Script s;
  s.table = {{0, {0.80, false}}, {10, {0.86, true}}, {100, {0.87, true}}, {1000, {0.85, true}}};
  CriteriaConfig cfg;
  cfg.all_mask_pass = 3;
  const SearchResult r = search_rm(s.handle(), cfg);
  CHECK(r.feasible);
  CHECK(r.best_r_m == 100);
  CHECK(r.trainer_calls == 4);
  CHECK(s.calls == std::vector<double>{0, 10, 100, 1000});
  CHECK(r.ledger.all_mask_pass == 3);
  REQUIRE(r.ledger.entries.size() == 4);
  CHECK_FALSE(r.ledger.entries[0].criteria.pass);
  CHECK(r.ledger.passing().size() == 3);
  CHECK_FALSE(r.recursed);
}

TEST_CASE("pass-sparse trace narrows around the single pass") {
  // Sweep over [0, 1e4] passes only at 100, so the search reruns [10, 1000]
  // in steps of (1000 - 10) / 8 = 123.75, skipping 10 and 1000, and stops
  // once the third pass (505) arrives.
  Script s;
  s.table = {{0, {0.80, false}},      {10, {0.82, false}},    {100, {0.84, true}},
             {1000, {0.83, false}},   {10000, {0.70, false}}, {133.75, {0.83, false}},
             {257.5, {0.88, true}},   {381.25, {0.84, false}}, {505, {0.86, true}}};
  CriteriaConfig cfg;
  cfg.range_end = 1e4;
  cfg.all_mask_pass = 3;
  const SearchResult r = search_rm(s.handle(), cfg);
  CHECK(r.recursed);
  CHECK(r.recursion_lo == 10);
  CHECK(r.recursion_hi == 1000);
  CHECK(s.calls == std::vector<double>{0, 10, 100, 1000, 10000, 133.75, 257.5, 381.25, 505});
  CHECK(r.trainer_calls == 9);
  CHECK(r.best_r_m == 257.5);
  CHECK(r.ledger.all_mask_pass == 3);
  CHECK(r.ledger.entries[5].from_recursion);
  CHECK_FALSE(r.ledger.entries[4].from_recursion);
}

TEST_CASE("recursion around zero uses [0, 10]") {
  Script s;
  s.table = {{0, {0.8, true}}, {10, {0.7, false}}, {100, {0.7, false}}};
  for (int i = 1; i < 8; ++i) s.table[1.25 * i] = {0.75, false};
  CriteriaConfig cfg;
  cfg.range_end = 100;
  const SearchResult r = search_rm(s.handle(), cfg);
  CHECK(r.recursed);
  CHECK(r.recursion_hi == 10);
  CHECK(r.trainer_calls == 3 + 7);
  CHECK(r.best_r_m == 0);
}

TEST_CASE("infeasible trace raises with the full ledger") {
  Script s;
  s.table = {{0, {0.8, false}}, {10, {0.8, false}}, {100, {0.8, false}}, {1000, {0.8, false}}};
  CriteriaConfig cfg;
  cfg.range_end = 1000;
  try {
    search_rm(s.handle(), cfg);
    FAIL("expected NoFeasibleRmError");
  } catch (const NoFeasibleRmError& e) {
    CHECK(e.result().trainer_calls == 4);
    CHECK(e.result().ledger.entries.size() == 4);
    CHECK(e.result().ledger.all_mask_pass == 0);
    CHECK_FALSE(e.result().feasible);
    CHECK_FALSE(e.result().recursed);
  }
  CHECK(s.calls.size() == 4);
}

TEST_CASE("search is deterministic and the report lists the ledger") {
  Script a, b;
  a.table = b.table = {{0, {0.80, false}}, {10, {0.86, true}}, {100, {0.87, true}},
                       {1000, {0.85, true}}};
  const CriteriaConfig cfg;
  const SearchResult ra = search_rm(a.handle(), cfg);
  const SearchResult rb = search_rm(b.handle(), cfg);
  const std::string report = search_report_json(ra, cfg);
  CHECK(report == search_report_json(rb, cfg));
  const auto j = nlohmann::json::parse(report);
  CHECK(j["chosen_r_m"] == 100.0);
  CHECK(j["trainer_calls"] == 4);
  CHECK(j["ledger"].size() == 4);
  CHECK(j["ledger"][1]["pass"] == true);
  CHECK(j["ledger"][1]["steps"].size() == 4);
  CHECK(j["candidates"].size() == 8);
}

}  // namespace itabnet
