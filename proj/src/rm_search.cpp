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


#include "itabnet/rm_search.hpp"

#include <algorithm>
#include <cmath>

#include "itabnet/masks.hpp"
#include "json.hpp"

namespace itabnet {
namespace {

bool SameCandidate(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

void CriteriaConfig::validate() const {
  if (!(band_lo > 0.0 && band_lo <= band_hi && band_hi < 1.0)) {
    throw ConfigError("importance band must satisfy 0 < lo <= hi < 1");
  }
  if (cols_lo < 1 || cols_hi < cols_lo) throw ConfigError("column count range must be >= 1");
  if (all_mask_pass < 1) throw ConfigError("all_mask_pass must be at least 1");
  if (!(range_start >= 0.0)) throw ConfigError("range start must be non-negative");
  if (range_start > range_end) throw ConfigError("range start exceeds range end");
  if (!(salience_floor > 0.0 && salience_floor < 1.0)) {
    throw ConfigError("salience floor must lie in (0, 1)");
  }
  if (linear_steps < 1) throw ConfigError("linear_steps must be at least 1");
}

std::vector<const LedgerEntry*> RegSearchLedger::passing() const {
  std::vector<const LedgerEntry*> out;
  for (const auto& e : entries) {
    if (e.criteria.pass) out.push_back(&e);
  }
  return out;
}

CriteriaResult criteria_check_importance(const Matrix& importance, const CriteriaConfig& cfg) {
  if (importance.empty()) throw InputError("empty mask tensor");
  CriteriaResult out;
  out.pass = true;
  for (std::size_t s = 0; s < importance.rows(); ++s) {
    StepVerdict v;
    for (std::size_t j = 0; j < importance.cols(); ++j) {
      const double x = importance(s, j);
      if (x >= cfg.band_lo && x <= cfg.band_hi) ++v.in_band;
      if (x > cfg.salience_floor) ++v.above_floor;
    }
    v.pass = v.in_band >= cfg.cols_lo && v.in_band <= cfg.cols_hi && v.above_floor >= cfg.cols_lo;
    out.pass = out.pass && v.pass;
    out.steps.push_back(v);
  }
  return out;
}

CriteriaResult criteria_check(const MaskTensor& masks, const CriteriaConfig& cfg) {
  return criteria_check_importance(aggregated_importance(masks), cfg);
}

std::vector<double> multiplicative_candidates(double alpha, double beta) {
  if (alpha > beta) throw ConfigError("range start exceeds range end");
  if (alpha < 0.0) throw ConfigError("range start must be non-negative");
  std::vector<double> out;
  for (double c = alpha; c <= beta * (1.0 + 1e-12);) {
    out.push_back(c);
    c = c == 0.0 ? 10.0 : c * 10.0;
  }
  return out;
}

int max_trainer_calls(const CriteriaConfig& cfg) {
  const auto sweep = static_cast<int>(multiplicative_candidates(cfg.range_start, cfg.range_end).size());
  return sweep + (cfg.recursion ? cfg.linear_steps + 1 : 0);
}

SearchResult search_rm(const TrainerHandle& trainer, const CriteriaConfig& cfg,
                       std::uint64_t seed) {
  cfg.validate();
  SearchResult res;
  res.sweep_candidates = multiplicative_candidates(cfg.range_start, cfg.range_end);

  auto evaluate = [&](double r_m, bool from_recursion) {
    TrialOutcome t = trainer(r_m, seed);
    ++res.trainer_calls;
    LedgerEntry e;
    e.r_m = r_m;
    e.accuracy = t.accuracy;
    e.criteria = criteria_check(t.masks, cfg);
    e.from_recursion = from_recursion;
    if (e.criteria.pass) ++res.ledger.all_mask_pass;
    res.ledger.entries.push_back(std::move(e));
    return res.ledger.all_mask_pass >= cfg.all_mask_pass;
  };

  bool done = false;
  for (double c : res.sweep_candidates) {
    if ((done = evaluate(c, false))) break;
  }

  if (!done && cfg.recursion && res.ledger.passing().size() == 1) {
    const double best = res.ledger.passing().front()->r_m;
    res.recursed = true;
    res.recursion_lo = best == 0.0 ? 0.0 : best / 10.0;
    res.recursion_hi = best == 0.0 ? 10.0 : best * 10.0;
    const double step = (res.recursion_hi - res.recursion_lo) / cfg.linear_steps;
    for (int i = 0; i <= cfg.linear_steps && !done; ++i) {
      const double c = i == cfg.linear_steps ? res.recursion_hi : res.recursion_lo + i * step;
      const bool seen = std::any_of(res.ledger.entries.begin(), res.ledger.entries.end(),
                                    [&](const LedgerEntry& e) { return SameCandidate(e.r_m, c); });
      if (!seen) done = evaluate(c, true);
    }
  }

  const auto passing = res.ledger.passing();
  if (passing.empty()) throw NoFeasibleRmError(std::move(res));
  const LedgerEntry* best = passing.front();
  for (const auto* e : passing) {
    if (e->accuracy > best->accuracy) best = e;
  }
  res.feasible = true;
  res.best_r_m = best->r_m;
  return res;
}

std::string search_report_json(const SearchResult& result, const CriteriaConfig& cfg) {
  nlohmann::ordered_json j;
  j["feasible"] = result.feasible;
  if (result.feasible) {
    j["chosen_r_m"] = result.best_r_m;
  } else {
    j["chosen_r_m"] = nullptr;
  }
  j["trainer_calls"] = result.trainer_calls;
  j["all_mask_pass"] = result.ledger.all_mask_pass;
  j["candidates"] = result.sweep_candidates;
  j["recursed"] = result.recursed;
  if (result.recursed) j["recursion_interval"] = {result.recursion_lo, result.recursion_hi};
  nlohmann::ordered_json crit;
  crit["band"] = {cfg.band_lo, cfg.band_hi};
  crit["cols"] = {cfg.cols_lo, cfg.cols_hi};
  crit["all_mask_pass_thresh"] = cfg.all_mask_pass;
  crit["range"] = {cfg.range_start, cfg.range_end};
  crit["salience_floor"] = cfg.salience_floor;
  crit["linear_steps"] = cfg.linear_steps;
  j["criteria"] = crit;
  j["ledger"] = nlohmann::ordered_json::array();
  for (const auto& e : result.ledger.entries) {
    nlohmann::ordered_json ej;
    ej["r_m"] = e.r_m;
    ej["accuracy"] = e.accuracy;
    ej["pass"] = e.criteria.pass;
    ej["from_recursion"] = e.from_recursion;
    ej["steps"] = nlohmann::ordered_json::array();
    for (const auto& s : e.criteria.steps) {
      ej["steps"].push_back({{"in_band", s.in_band}, {"above_floor", s.above_floor}, {"pass", s.pass}});
    }
    j["ledger"].push_back(ej);
  }
  return j.dump(2) + "\n";
}

}  // namespace itabnet
