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
#include <functional>
#include <string>
#include <vector>

#include "itabnet/errors.hpp"
#include "itabnet/matrix.hpp"
#include "itabnet/model.hpp"

namespace itabnet {

struct CriteriaConfig {
  // delta: per-feature aggregated-importance band.
  double band_lo = 0.20;
  double band_hi = 0.25;
  // gamma: required count of in-band features per step.
  int cols_lo = 2;
  int cols_hi = 3;
  // epsilon: stop once this many candidates pass on every step.
  int all_mask_pass = 3;
  // alpha, beta: multiplicative sweep bounds.
  double range_start = 0.0;
  double range_end = 1e7;
  // Importance above which a feature counts as selected.
  double salience_floor = 0.05;
  // lambda: allow the single narrowing pass.
  bool recursion = true;
  // Linear steps across the narrowed interval.
  int linear_steps = 8;

  void validate() const;
};

struct StepVerdict {
  int in_band = 0;
  int above_floor = 0;
  bool pass = false;
};

struct CriteriaResult {
  std::vector<StepVerdict> steps;
  bool pass = false;  // every step passed
};

// Step passes iff the in-band count lies in [cols_lo, cols_hi] and at least
// cols_lo features have importance above salience_floor. Throws InputError on
// an empty tensor.
CriteriaResult criteria_check(const MaskTensor& masks, const CriteriaConfig& cfg);
// Same rule on a K x D aggregated-importance matrix.
CriteriaResult criteria_check_importance(const Matrix& importance, const CriteriaConfig& cfg);

struct TrialOutcome {
  double accuracy = 0.0;
  MaskTensor masks;
};

using TrainerHandle = std::function<TrialOutcome(double r_m, std::uint64_t seed)>;

struct LedgerEntry {
  double r_m = 0.0;
  double accuracy = 0.0;
  CriteriaResult criteria;
  bool from_recursion = false;
};

// Every evaluated candidate in evaluation order; the passing ones form the
// r_M -> accuracy dictionary the search maximizes over.
struct RegSearchLedger {
  std::vector<LedgerEntry> entries;
  int all_mask_pass = 0;  // iota

  std::vector<const LedgerEntry*> passing() const;
};

struct SearchResult {
  bool feasible = false;
  double best_r_m = 0.0;
  RegSearchLedger ledger;
  std::vector<double> sweep_candidates;  // the multiplicative list up to range_end
  int trainer_calls = 0;
  bool recursed = false;
  double recursion_lo = 0.0;
  double recursion_hi = 0.0;
};

// Raised when no candidate passes; carries the full search state so callers
// can still report it (and fall back to r_M = 0).
class NoFeasibleRmError : public Error {
 public:
  explicit NoFeasibleRmError(SearchResult result)
      : Error("no r_M candidate met the interpretability criteria"), result_(std::move(result)) {}
  const SearchResult& result() const { return result_; }

 private:
  SearchResult result_;
};

// alpha, 10 alpha, ... (0 is followed by 10) while <= beta.
std::vector<double> multiplicative_candidates(double alpha, double beta);

// Upper bound on trainer calls for cfg.
int max_trainer_calls(const CriteriaConfig& cfg);

// Sweeps the multiplicative candidates, stopping as soon as iota reaches
// epsilon. If exactly one candidate passed at exhaustion and recursion is
// enabled, sweeps [best/10, best*10] ([0, 10] for best = 0) in linear_steps
// equal steps, skipping values already tried. Returns the passing candidate
// with the highest accuracy (earliest on ties). Throws ConfigError for
// alpha > beta and NoFeasibleRmError when nothing passes.
SearchResult search_rm(const TrainerHandle& trainer, const CriteriaConfig& cfg,
                       std::uint64_t seed = 0);

// {"chosen_r_m":..,"feasible":..,"trainer_calls":..,"candidates":[..],
//  "ledger":[{"r_m":..,"accuracy":..,"pass":..,"steps":[..]}], ...}
std::string search_report_json(const SearchResult& result, const CriteriaConfig& cfg);

}  // namespace itabnet
