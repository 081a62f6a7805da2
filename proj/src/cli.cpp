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


#include "itabnet/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "itabnet/checkpoint.hpp"
#include "itabnet/dataset.hpp"
#include "itabnet/errors.hpp"
#include "itabnet/heatmap.hpp"
#include "itabnet/kv_config.hpp"
#include "itabnet/llm_client.hpp"
#include "itabnet/masks.hpp"
#include "itabnet/metrics.hpp"
#include "itabnet/prompt.hpp"
#include "itabnet/rm_search.hpp"
#include "itabnet/synthetic.hpp"
#include "itabnet/trainer.hpp"
#include "json.hpp"

namespace itabnet {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

// Flag values recorded as config overrides, applied after the config file.
struct Overrides {
  std::vector<std::pair<std::string, std::string>> items;
  std::vector<std::string> assignments;  // --set key=value
  std::string config_path;
};

void Value(CLI::App* app, Overrides& ov, const std::string& flag, const std::string& key,
           const std::string& help) {
  app->add_option_function<std::string>(
      flag, [&ov, key](const std::string& v) { ov.items.emplace_back(key, v); }, help);
}

void Switch(CLI::App* app, Overrides& ov, const std::string& flag, const std::string& key,
            const std::string& help) {
  app->add_flag_callback(flag, [&ov, key] { ov.items.emplace_back(key, "true"); }, help);
}

void Common(CLI::App* app, Overrides& ov) {
  app->add_option("--config", ov.config_path, "key=value config file")->check(CLI::ExistingFile);
  app->add_option("--set", ov.assignments, "override a config key (key=value)");
  Value(app, ov, "--out-dir", "out_dir", "output directory (default: out)");
}

KvConfig Resolve(const Overrides& ov) {
  KvConfig cfg = ov.config_path.empty() ? KvConfig{} : KvConfig::load(ov.config_path);
  for (const auto& a : ov.assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + a + "'");
    cfg.set(a.substr(0, eq), a.substr(eq + 1));
  }
  for (const auto& [k, v] : ov.items) cfg.set(k, v);
  return cfg;
}

fs::path DataDir() {
  if (const char* env = std::getenv("ITABNET_DATA_DIR"); env != nullptr && *env != '\0') return env;
  return ITABNET_DATA_DIR;
}

std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ',')) {
    const auto b = cur.find_first_not_of(' ');
    if (b == std::string::npos) continue;
    out.push_back(cur.substr(b, cur.find_last_not_of(' ') - b + 1));
  }
  return out;
}

std::string FormatNumber(double v) {
  char buf[64];
  if (std::floor(v) == v && std::abs(v) < 1e15) {
    std::snprintf(buf, sizeof buf, "%.0f", v);
  } else {
    std::snprintf(buf, sizeof buf, "%.17g", v);
  }
  return buf;
}

void RequireFile(const fs::path& p, const std::string& what) {
  if (p.empty()) throw ConfigError(what + " is required");
  if (!fs::is_regular_file(p)) throw ConfigError(what + " not found: " + p.string());
}

fs::path EnsureOutDir(const KvConfig& cfg) {
  const fs::path dir = cfg.get_string("out_dir", "out");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw ConfigError("cannot create output directory " + dir.string());
  }
  const fs::path probe = dir / ".itabnet_write_probe";
  {
    std::ofstream out(probe);
    if (!out) throw ConfigError("output directory is not writable: " + dir.string());
  }
  fs::remove(probe, ec);
  return dir;
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

void WriteJson(const fs::path& path, const Json& j) { WriteText(path, j.dump(2) + "\n"); }

void WriteTimings(const fs::path& dir, const std::string& command, Clock::time_point start,
                  Json extra = Json::object()) {
  Json t;
  t["command"] = command;
  t["wall_seconds"] = std::chrono::duration<double>(Clock::now() - start).count();
  for (auto& [k, v] : extra.items()) t[k] = v;
  WriteJson(dir / "timings.json", t);
}

// ---- config readers ----

ModelConfig ReadModel(const KvConfig& c) {
  ModelConfig m;
  m.n_d = c.get_int("model.n_d", m.n_d);
  m.n_a = c.get_int("model.n_a", m.n_d);
  m.n_steps = c.get_int("model.n_steps", m.n_steps);
  m.use_prior_scale = c.get_bool("model.use_prior_scale", m.use_prior_scale);
  m.gamma = c.get_double("model.gamma", m.gamma);
  m.tau = c.get_double("model.tau", m.tau);
  m.n_shared = c.get_int("model.n_shared", m.n_shared);
  m.n_independent = c.get_int("model.n_independent", m.n_independent);
  m.mlp_hidden = c.get_int("model.mlp_hidden", m.mlp_hidden);
  return m;
}

TrainConfig ReadTrain(const KvConfig& c) {
  TrainConfig t;
  t.learning_rate = c.get_double("train.learning_rate", t.learning_rate);
  t.batch_size = c.get_int("train.batch_size", t.batch_size);
  t.max_epochs = c.get_int("train.max_epochs", t.max_epochs);
  t.early_stop_patience = c.get_int("train.early_stop_patience", t.early_stop_patience);
  t.grad_clip_norm = c.get_double("train.grad_clip_norm", t.grad_clip_norm);
  t.r_m = c.get_double("train.r_m", t.r_m);
  t.prior_weight = c.get_double("train.prior_weight", t.prior_weight);
  t.warmup_epochs = c.get_int("train.warmup_epochs", t.warmup_epochs);
  t.ramp_epochs = c.get_int("train.ramp_epochs", t.ramp_epochs);
  t.ramp_floor = c.get_double("train.ramp_floor", t.ramp_floor);
  t.seed = c.get_u64("train.seed", t.seed);
  t.pairwise_mode = parse_pairwise_mode(c.get_string("train.pairwise_mode", "all_pairs"));
  t.selection_metric = parse_metric(c.get_string("train.metric", "accuracy"));
  t.validate();
  return t;
}

CriteriaConfig ReadCriteria(const KvConfig& c) {
  CriteriaConfig k;
  k.band_lo = c.get_double("criteria.band_lo", k.band_lo);
  k.band_hi = c.get_double("criteria.band_hi", k.band_hi);
  k.cols_lo = c.get_int("criteria.cols_lo", k.cols_lo);
  k.cols_hi = c.get_int("criteria.cols_hi", k.cols_hi);
  k.all_mask_pass = c.get_int("criteria.all_mask_pass", k.all_mask_pass);
  k.range_start = c.get_double("criteria.range_start", k.range_start);
  k.range_end = c.get_double("criteria.range_end", k.range_end);
  k.salience_floor = c.get_double("criteria.salience_floor", k.salience_floor);
  k.recursion = c.get_bool("criteria.recursion", k.recursion);
  k.linear_steps = c.get_int("criteria.linear_steps", k.linear_steps);
  k.validate();
  return k;
}

LlmConfig ReadLlm(const KvConfig& c) {
  LlmConfig l;
  l.endpoint = c.get_string("llm.endpoint", l.endpoint);
  l.model = c.get_string("llm.model", l.model);
  l.api_key_env = c.get_string("llm.api_key_env", l.api_key_env);
  l.timeout_seconds = c.get_double("llm.timeout_seconds", l.timeout_seconds);
  l.max_retries = c.get_int("llm.max_retries", l.max_retries);
  l.backoff_seconds = c.get_double("llm.backoff_seconds", l.backoff_seconds);
  l.temperature = c.get_double("llm.temperature", l.temperature);
  l.validate();
  return l;
}

SplitSpec ReadSplit(const KvConfig& c) {
  SplitSpec s;
  s.train_frac = c.get_double("data.train_frac", s.train_frac);
  s.val_frac = c.get_double("data.val_frac", s.val_frac);
  s.test_frac = c.get_double("data.test_frac", s.test_frac);
  s.seed = c.get_u64("data.split_seed", s.seed);
  s.validate();
  return s;
}

SalientPolicy ReadPolicy(const KvConfig& c) {
  const std::string p = c.get_string("interp.policy", "standard");
  if (p == "standard") return SalientPolicy::standard();
  const auto parts = [&p] {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(p);
    while (std::getline(in, cur, ':')) out.push_back(cur);
    return out;
  }();
  try {
    if (parts.size() == 2 && parts[0] == "top_k") return SalientPolicy::top_k(std::stoi(parts[1]));
    if ((parts.size() == 2 || parts.size() == 3) && parts[0] == "floor") {
      return SalientPolicy::floor_at(std::stod(parts[1]), parts.size() == 3 ? std::stoi(parts[2]) : 0);
    }
  } catch (const std::logic_error&) {
  }
  throw ConfigError("interp.policy must be standard, top_k:<k> or floor:<t>[:<cap>], got '" + p + "'");
}

// ---- data ----

struct LoadedData {
  SplitDatasets parts;
};

// Fisher-Yates holdout of floor(frac * n) rows, matching split().
std::pair<Dataset, Dataset> Holdout(const Dataset& ds, double frac, std::uint64_t seed) {
  const std::size_t n = ds.n_rows();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = n - 1; i > 0 && n > 0; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i);
    std::swap(order[i], order[pick(rng)]);
  }
  const auto n_hold = static_cast<std::size_t>(std::floor(frac * static_cast<double>(n) + 1e-9));
  if (n_hold == 0 || n_hold >= n) throw InputError("training file too small to hold out validation rows");
  std::vector<std::size_t> keep(order.begin(), order.end() - static_cast<std::ptrdiff_t>(n_hold));
  std::vector<std::size_t> hold(order.end() - static_cast<std::ptrdiff_t>(n_hold), order.end());
  return {subset(ds, keep), subset(ds, hold)};
}

// data.path is split train/val/test; otherwise data.train (+ data.val, or a
// seeded holdout of it) and data.test are used as given.
LoadedData LoadData(const KvConfig& c) {
  const std::string target = c.get_string("data.target", "y");
  const auto cats = SplitList(c.get_string("data.categorical", ""));
  const std::string path = c.get_string("data.path", "");
  LoadedData d;
  if (!path.empty()) {
    RequireFile(path, "data file");
    d.parts = split(load_csv(path, target, cats), ReadSplit(c));
    return d;
  }
  const std::string train_path = c.get_string("data.train", "");
  const std::string test_path = c.get_string("data.test", "");
  if (train_path.empty()) throw ConfigError("no data given: set --data or --train/--test");
  RequireFile(train_path, "training file");
  RequireFile(test_path, "test file");
  Dataset train = load_csv(train_path, target, cats);
  d.parts.test = load_csv_like(test_path, train);
  const std::string val_path = c.get_string("data.val", "");
  if (!val_path.empty()) {
    RequireFile(val_path, "validation file");
    d.parts.val = load_csv_like(val_path, train);
    d.parts.train = std::move(train);
  } else {
    auto [tr, va] = Holdout(train, c.get_double("data.val_frac", 0.1), c.get_u64("data.split_seed", 0));
    d.parts.train = std::move(tr);
    d.parts.val = std::move(va);
  }
  return d;
}

// Rows of a CSV read against a checkpoint schema; eval.part picks the
// matching split of it (all, train, val, test).
Dataset LoadEvalData(const KvConfig& c, const Dataset& schema) {
  const std::string path = c.get_string("data.path", "");
  RequireFile(path, "data file");
  Dataset ds = load_csv_like(path, schema);
  const std::string part = c.get_string("eval.part", "all");
  if (part == "all") return ds;
  auto parts = split(ds, ReadSplit(c));
  if (part == "train") return parts.train;
  if (part == "val") return parts.val;
  if (part == "test") return parts.test;
  throw ConfigError("eval.part must be all, train, val or test");
}

// ---- training ----

struct SeedRun {
  std::uint64_t seed;
  TrainResult result;
  double test_accuracy;
  std::optional<double> test_auc;
  Prediction test_pred;
  double seconds;
};

Json Stats(const std::vector<double>& v) {
  Json j;
  j["mean"] = mean(v);
  j["std"] = sample_std(v);
  j["values"] = v;
  return j;
}

// Trains one model per seed and writes summary.json, metrics.jsonl, the
// first seed's checkpoint and test-split mask CSVs. Returns the exit code.
int RunTraining(const KvConfig& c, const LoadedData& data, double r_m, const fs::path& out,
                Json& timing, const std::string& command) {
  const SplitDatasets& p = data.parts;
  const ModelConfig base = model_config_for(p.train, ReadModel(c));
  TrainConfig tc = ReadTrain(c);
  tc.r_m = r_m;
  const int n_seeds = c.get_int("train.seeds", 1);
  if (n_seeds < 1) throw ConfigError("train.seeds must be at least 1");
  const bool binary = p.train.task() == Task::kBinary;

  std::ofstream metrics(out / "metrics.jsonl", std::ios::binary);
  if (!metrics) throw IoError("cannot write metrics.jsonl");
  std::vector<SeedRun> runs;
  for (int i = 0; i < n_seeds; ++i) {
    const std::uint64_t seed = tc.seed + static_cast<std::uint64_t>(i);
    ModelConfig mc = base;
    mc.seed = seed;
    TrainConfig seed_tc = tc;
    seed_tc.seed = seed;
    const auto t0 = Clock::now();
    TrainResult result = train(Model(mc), p.train, p.val, seed_tc, [&](const EpochRecord& e) {
      Json line;
      line["seed"] = seed;
      const Json base = Json::parse(metrics_json_line(e.epoch, e.train_loss, e.val_accuracy));
      for (auto& [k, v] : base.items()) line[k] = v;
      line["val_metric"] = e.val_metric;
      metrics << line.dump() << "\n";
    });
    const double seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    Prediction pred = predict(result.model, p.test.X);
    SeedRun run{seed, std::move(result), evaluate(pred, p.test, Metric::kAccuracy), std::nullopt,
                std::move(pred), seconds};
    if (binary) run.test_auc = evaluate(run.test_pred, p.test, Metric::kAuc);
    std::cout << "seed " << run.seed << ": " << train_status_name(run.result.status)
              << ", best epoch " << run.result.best_epoch << ", test accuracy " << run.test_accuracy;
    if (run.test_auc) std::cout << ", test auc " << *run.test_auc;
    std::cout << "\n";
    runs.push_back(std::move(run));
  }

  const SeedRun& first = runs.front();
  save_checkpoint(out / "model.ckpt", first.result.model, dataset_schema(p.train));
  write_mask_csvs(first.test_pred.masks, p.train.feature_names, out);

  Json s;
  s["command"] = command;
  s["data"] = {{"n_train", p.train.n_rows()},
               {"n_val", p.val.n_rows()},
               {"n_test", p.test.n_rows()},
               {"n_features", p.train.n_features()},
               {"n_classes", p.train.n_classes()}};
  s["r_m"] = r_m;
  s["n_steps"] = base.n_steps;
  s["pairwise_mode"] = pairwise_mode_name(tc.pairwise_mode);
  s["selection_metric"] = metric_name(tc.selection_metric);
  std::vector<double> accs;
  std::vector<double> aucs;
  Json per_seed = Json::array();
  Json failures = Json::array();
  Json seconds = Json::array();
  for (const auto& r : runs) {
    Json e;
    e["seed"] = r.seed;
    e["status"] = train_status_name(r.result.status);
    e["epochs_run"] = r.result.history.size();
    e["best_epoch"] = r.result.best_epoch;
    if (r.result.best_epoch >= 0) {
      e["val_metric"] = r.result.history[static_cast<std::size_t>(r.result.best_epoch)].val_metric;
    }
    e["test_accuracy"] = r.test_accuracy;
    if (r.test_auc) e["test_auc"] = *r.test_auc;
    per_seed.push_back(e);
    seconds.push_back(r.seconds);
    if (r.result.status == TrainStatus::kAborted) {
      failures.push_back({{"seed", r.seed},
                          {"reason", r.result.abort_reason},
                          {"last_finite_epoch", r.result.last_finite_epoch}});
      continue;
    }
    accs.push_back(r.test_accuracy);
    if (r.test_auc) aucs.push_back(*r.test_auc);
  }
  s["seeds"] = runs.size();
  if (!accs.empty()) s["test_accuracy"] = Stats(accs);
  if (!aucs.empty()) s["test_auc"] = Stats(aucs);
  s["per_seed"] = per_seed;
  s["failures"] = failures;
  s["artifacts_seed"] = first.seed;
  WriteJson(out / "summary.json", s);
  timing["per_seed_seconds"] = seconds;
  return failures.empty() ? kExitOk : kExitTraining;
}

// ---- masks for interpretation commands ----

struct MaskSource {
  MaskTensor masks;
  std::vector<std::string> names;
};

MaskSource LoadMasks(const KvConfig& c) {
  const std::string dir = c.get_string("masks_dir", "");
  if (!dir.empty()) {
    if (!fs::is_directory(dir)) throw ConfigError("mask directory not found: " + dir);
    if (!fs::is_regular_file(fs::path(dir) / "mask_0.csv")) {
      throw ConfigError("no mask_0.csv in " + dir);
    }
    MaskCsvSet set = read_mask_csvs(dir);
    return {std::move(set.masks), std::move(set.feature_names)};
  }
  const std::string ckpt = c.get_string("checkpoint", "");
  if (ckpt.empty()) throw ConfigError("give --masks-dir or --checkpoint with --data");
  RequireFile(ckpt, "checkpoint");
  Checkpoint cp = load_checkpoint(ckpt);
  const Dataset ds = LoadEvalData(c, cp.schema);
  return {predict(cp.model, ds.X).masks, cp.schema.feature_names};
}

std::string ReadFileText(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string s = ss.str();
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
  return s;
}

// ---- commands ----

int CmdSynth(const KvConfig& c) {
  const auto start = Clock::now();
  SyntheticSpec spec;
  spec.kind = parse_syn_kind(c.get_string("synth.kind", "syn1"));
  const auto n = static_cast<std::size_t>(c.get_u64("synth.n", spec.n_train));
  spec.n_train = static_cast<std::size_t>(c.get_u64("synth.n_train", n));
  spec.n_test = static_cast<std::size_t>(c.get_u64("synth.n_test", n));
  spec.seed = c.get_u64("synth.seed", 0);
  spec.validate();
  const fs::path out = EnsureOutDir(c);
  const SyntheticData data = generate_synthetic(spec);
  write_csv(data.train, out / "train.csv");
  write_csv(data.test, out / "test.csv");
  std::ostringstream gt;
  gt << "split,row,features\n";
  const auto dump = [&gt](const char* name, const std::vector<std::vector<int>>& truth) {
    for (std::size_t r = 0; r < truth.size(); ++r) {
      gt << name << ',' << r << ',';
      for (std::size_t i = 0; i < truth[r].size(); ++i) gt << (i ? " " : "") << truth[r][i];
      gt << '\n';
    }
  };
  dump("train", data.train_ground_truth);
  dump("test", data.test_ground_truth);
  WriteText(out / "ground_truth.csv", gt.str());
  Json s;
  s["command"] = "synth";
  s["kind"] = syn_kind_name(spec.kind);
  s["n_train"] = spec.n_train;
  s["n_test"] = spec.n_test;
  s["seed"] = spec.seed;
  const auto positive_rate = [](const Dataset& ds) {
    double k = 0;
    for (int y : ds.y) k += y;
    return k / static_cast<double>(ds.n_rows());
  };
  s["train_positive_rate"] = positive_rate(data.train);
  s["test_positive_rate"] = positive_rate(data.test);
  WriteJson(out / "summary.json", s);
  WriteTimings(out, "synth", start);
  std::cout << "wrote " << (out / "train.csv").string() << " and " << (out / "test.csv").string()
            << "\n";
  return kExitOk;
}

int CmdTrain(const KvConfig& c) {
  const auto start = Clock::now();
  const LoadedData data = LoadData(c);
  const TrainConfig tc = ReadTrain(c);
  const fs::path out = EnsureOutDir(c);
  Json timing = Json::object();
  const int code = RunTraining(c, data, tc.r_m, out, timing, "train");
  WriteTimings(out, "train", start, timing);
  return code;
}

// "<r_m> <accuracy> <pass|fail>" lines; '#' starts a comment.
std::vector<std::tuple<double, double, bool>> ReadScript(const fs::path& path) {
  RequireFile(path, "dry-run script");
  std::ifstream in(path);
  std::vector<std::tuple<double, double, bool>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = line.substr(0, line.find('#'));
    std::istringstream ls(line);
    double r = 0;
    double acc = 0;
    std::string verdict;
    if (!(ls >> r)) continue;
    if (!(ls >> acc >> verdict) || (verdict != "pass" && verdict != "fail")) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                        ": expected '<r_m> <accuracy> <pass|fail>'");
    }
    rows.emplace_back(r, acc, verdict == "pass");
  }
  return rows;
}

// One-sample masks whose importances pass or fail the default criteria.
MaskTensor ScriptedMasks(bool pass, int n_steps) {
  constexpr int kD = 10;
  Matrix row(1, kD, 0.0);
  if (pass) {
    const double head[3] = {0.23, 0.22, 0.21};
    for (int j = 0; j < kD; ++j) row(0, j) = j < 3 ? head[j] : (1.0 - 0.66) / (kD - 3);
  } else {
    for (int j = 0; j < kD; ++j) row(0, j) = 1.0 / kD;
  }
  MaskTensor m;
  m.steps.assign(static_cast<std::size_t>(n_steps), row);
  return m;
}

int CmdSearchRm(const KvConfig& c) {
  const auto start = Clock::now();
  const CriteriaConfig crit = ReadCriteria(c);
  const fs::path out = EnsureOutDir(c);
  const auto candidates = multiplicative_candidates(crit.range_start, crit.range_end);
  std::cout << "candidates:";
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    std::cout << (i ? "," : " ") << FormatNumber(candidates[i]);
  }
  std::cout << "\n";

  TrainerHandle handle;
  std::optional<LoadedData> data;
  const std::string script = c.get_string("search.dry_run_script", "");
  if (!script.empty()) {
    const auto rows = ReadScript(script);
    const int k = ReadModel(c).n_steps;
    handle = [rows, k](double r_m, std::uint64_t) {
      for (const auto& [r, acc, pass] : rows) {
        if (std::abs(r - r_m) <= 1e-9 * std::max(1.0, std::abs(r_m))) {
          return TrialOutcome{acc, ScriptedMasks(pass, k)};
        }
      }
      throw ConfigError("dry-run script has no entry for r_M=" + FormatNumber(r_m));
    };
  } else {
    data = LoadData(c);
    const ModelConfig base = model_config_for(data->parts.train, ReadModel(c));
    const TrainConfig tc0 = ReadTrain(c);
    const SplitDatasets* p = &data->parts;
    handle = [base, tc0, p](double r_m, std::uint64_t seed) {
      ModelConfig mc = base;
      mc.seed = seed;
      TrainConfig tc = tc0;
      tc.r_m = r_m;
      tc.seed = seed;
      TrainResult r = train(Model(mc), p->train, p->val, tc);
      Prediction pred = predict(r.model, p->val.X);
      TrialOutcome t{evaluate(pred, p->val, Metric::kAccuracy), std::move(pred.masks)};
      std::cout << "r_M=" << FormatNumber(r_m) << " val accuracy " << t.accuracy << "\n";
      return t;
    };
  }

  SearchResult result;
  bool feasible = true;
  try {
    result = search_rm(handle, crit, ReadTrain(c).seed);
  } catch (const NoFeasibleRmError& e) {
    result = e.result();
    feasible = false;
  }
  WriteText(out / "search_report.json", search_report_json(result, crit));
  Json timing = Json::object();
  if (!feasible) {
    WriteTimings(out, "search-rm", start, timing);
    std::cerr << "no feasible r_M after " << result.trainer_calls << " trainer calls\n";
    return kExitInfeasible;
  }
  std::cout << "chosen r_M* = " << FormatNumber(result.best_r_m) << " after " << result.trainer_calls
            << " trainer calls\n";
  int code = kExitOk;
  if (c.get_int("search.final_seeds", 0) > 0) {
    if (!data) throw ConfigError("final training needs data, not a dry-run script");
    KvConfig final_cfg = c;
    final_cfg.set("train.seeds", std::to_string(c.get_int("search.final_seeds", 0)));
    code = RunTraining(final_cfg, *data, result.best_r_m, out, timing, "search-rm");
  }
  WriteTimings(out, "search-rm", start, timing);
  return code;
}

int CmdEvaluate(const KvConfig& c) {
  const auto start = Clock::now();
  const std::string ckpt = c.get_string("checkpoint", "");
  RequireFile(ckpt, "checkpoint");
  const Checkpoint cp = load_checkpoint(ckpt);
  const Dataset ds = LoadEvalData(c, cp.schema);
  const fs::path out = EnsureOutDir(c);
  const Prediction pred = predict(cp.model, ds.X);
  Json s;
  s["command"] = "evaluate";
  s["n_rows"] = ds.n_rows();
  s["accuracy"] = evaluate(pred, ds, Metric::kAccuracy);
  if (ds.task() == Task::kBinary) s["auc"] = evaluate(pred, ds, Metric::kAuc);
  WriteJson(out / "summary.json", s);
  WriteTimings(out, "evaluate", start);
  std::cout << s.dump() << "\n";
  return kExitOk;
}

int CmdExportMasks(const KvConfig& c) {
  const auto start = Clock::now();
  const MaskSource src = LoadMasks(c);
  const fs::path out = EnsureOutDir(c);
  const auto files = write_mask_csvs(src.masks, src.names, out);
  WriteTimings(out, "export-masks", start);
  std::cout << "wrote " << files.size() << " mask files to " << out.string() << "\n";
  return kExitOk;
}

int CmdRenderMasks(const KvConfig& c) {
  const auto start = Clock::now();
  const MaskSource src = LoadMasks(c);
  const fs::path out = EnsureOutDir(c);
  HeatmapStyle style;
  style.cell_width = c.get_int("render.cell_width", style.cell_width);
  style.row_height = c.get_int("render.row_height", style.row_height);
  const auto files = render_heatmap(src.masks, src.names, out, style);
  WriteTimings(out, "render-masks", start);
  std::cout << "wrote " << files.size() << " images to " << out.string() << "\n";
  return kExitOk;
}

int CmdExplain(const KvConfig& c) {
  const auto start = Clock::now();
  const bool send = c.get_bool("llm.send", false);
  // Fail on configuration before any work.
  std::optional<LlmConfig> llm;
  if (send) {
    llm = ReadLlm(c);
    const char* key = std::getenv(llm->api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
      throw ConfigError("--send needs the API key in environment variable " + llm->api_key_env);
    }
  }
  const MaskSource src = LoadMasks(c);
  const fs::path out = EnsureOutDir(c);

  const std::string name = c.get_string("data.name", "");
  std::vector<std::string> names = src.names;
  fs::path display = c.get_string("data.display_names", "");
  if (display.empty() && !name.empty() && fs::is_regular_file(DataDir() / (name + ".display_names.txt"))) {
    display = DataDir() / (name + ".display_names.txt");
  }
  if (!display.empty()) {
    RequireFile(display, "display-name file");
    names = apply_display_names(names, load_display_names(display));
  }

  DatasetMeta meta;
  meta.name = name;
  meta.n_test = static_cast<std::size_t>(c.get_u64("interp.n_test", src.masks.n_samples()));
  meta.n_features = src.masks.n_features();
  if (c.has("data.description")) {
    meta.description = c.get_string("data.description", "");
  } else {
    fs::path desc = c.get_string("data.description_file", "");
    if (desc.empty() && !name.empty()) desc = DataDir() / (name + ".description.txt");
    if (!desc.empty() && fs::is_regular_file(desc)) {
      meta.description = ReadFileText(desc);
    } else if (!c.get_string("data.description_file", "").empty()) {
      throw ConfigError("description file not found: " + desc.string());
    } else {
      meta.description = "The " + (name.empty() ? std::string("given") : name) + " dataset is considered.";
    }
  }

  const SalientSummary summary = salient_features(src.masks, names, ReadPolicy(c));
  const int n_examples = c.get_int("interp.examples", 2);
  std::vector<IclExample> examples;
  if (n_examples > 0) {
    const fs::path corpus_dir = c.get_string("interp.corpus_dir", (DataDir() / "icl").string());
    if (!fs::is_directory(corpus_dir)) throw ConfigError("example corpus not found: " + corpus_dir.string());
    examples = select_icl_examples(load_icl_corpus(corpus_dir), name, n_examples,
                                   c.get_int("interp.rotation", 0));
  }
  std::optional<std::string> persona;
  if (c.has("interp.persona")) persona = c.get_string("interp.persona", "");
  const PromptBundle bundle = compile_prompt(meta, summary, examples, persona);
  WriteText(out / "prompt.txt", bundle.text);
  std::cout << "wrote " << (out / "prompt.txt").string() << "\n";

  int code = kExitOk;
  if (send) {
    const auto write_reply = [&](const LlmReply& reply) {
      Json j;
      for (const auto& k : bundle.expected_schema) {
        if (reply.entries.count(k)) j[k] = reply.entries.at(k);
      }
      for (const auto& [k, v] : reply.entries) {
        if (!j.contains(k)) j[k] = v;
      }
      WriteJson(out / "interpretation.json", j);
    };
    try {
      write_reply(query_llm(bundle, *llm));
      std::cout << "wrote " << (out / "interpretation.json").string() << "\n";
    } catch (const LlmSchemaError& e) {
      write_reply(e.reply());
      std::cerr << "error: " << e.what() << "\n";
      code = kExitLlm;
    } catch (const LlmParseError& e) {
      WriteText(out / "interpretation_raw.txt", e.raw_text());
      std::cerr << "error: " << e.what() << "; raw reply saved to interpretation_raw.txt\n";
      code = kExitLlm;
    }
  }
  WriteTimings(out, "explain", start);
  return code;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Interpretable TabNet training, r_M search and mask interpretation", "itabnet"};
  app.require_subcommand(1);
  Overrides ov;

  auto* synth = app.add_subcommand("synth", "generate a Syn1..Syn6 benchmark");
  Common(synth, ov);
  Value(synth, ov, "--kind", "synth.kind", "syn1 .. syn6");
  Value(synth, ov, "--n", "synth.n", "rows in each of train and test");
  Value(synth, ov, "--n-train", "synth.n_train", "training rows");
  Value(synth, ov, "--n-test", "synth.n_test", "test rows");
  Value(synth, ov, "--seed", "synth.seed", "generator seed");

  const auto data_flags = [&ov](CLI::App* cmd) {
    Value(cmd, ov, "--data", "data.path", "CSV split 80/10/10 into train/val/test");
    Value(cmd, ov, "--train", "data.train", "training CSV");
    Value(cmd, ov, "--val", "data.val", "validation CSV (default: holdout of --train)");
    Value(cmd, ov, "--test", "data.test", "test CSV");
    Value(cmd, ov, "--target", "data.target", "label column (default y)");
    Value(cmd, ov, "--categorical", "data.categorical", "comma-separated categorical columns");
    Value(cmd, ov, "--split-seed", "data.split_seed", "split seed");
  };
  const auto train_flags = [&ov](CLI::App* cmd) {
    Value(cmd, ov, "--r-m", "train.r_m", "sparsity regularizer weight");
    Value(cmd, ov, "--steps", "model.n_steps", "decision steps K");
    Value(cmd, ov, "--epochs", "train.max_epochs", "maximum epochs");
    Value(cmd, ov, "--lr", "train.learning_rate", "learning rate");
    Value(cmd, ov, "--batch-size", "train.batch_size", "batch size");
    Value(cmd, ov, "--seed", "train.seed", "first training seed");
    Value(cmd, ov, "--metric", "train.metric", "validation metric: accuracy or auc");
    Value(cmd, ov, "--pairwise", "train.pairwise_mode", "all_pairs or adjacent");
  };

  auto* trn = app.add_subcommand("train", "train and report test metrics");
  Common(trn, ov);
  data_flags(trn);
  train_flags(trn);
  Value(trn, ov, "--seeds", "train.seeds", "number of seeds (consecutive from --seed)");

  auto* search = app.add_subcommand("search-rm", "adaptive search for r_M");
  Common(search, ov);
  data_flags(search);
  train_flags(search);
  search->add_option_function<std::vector<std::string>>(
      "--range",
      [&ov](const std::vector<std::string>& v) {
        ov.items.emplace_back("criteria.range_start", v[0]);
        ov.items.emplace_back("criteria.range_end", v[1]);
      },
      "alpha beta")
      ->expected(2);
  Value(search, ov, "--epsilon", "criteria.all_mask_pass", "stop after this many passing candidates");
  Switch(search, ov, "--no-recursion", "criteria.recursion", "disable the narrowing pass");
  Value(search, ov, "--dry-run-script", "search.dry_run_script",
        "scripted trainer: lines '<r_m> <accuracy> <pass|fail>'");
  Value(search, ov, "--final-seeds", "search.final_seeds", "train r_M* on this many seeds");

  const auto mask_flags = [&ov](CLI::App* cmd) {
    Value(cmd, ov, "--checkpoint", "checkpoint", "model checkpoint");
    Value(cmd, ov, "--data", "data.path", "CSV to run the checkpoint on");
    Value(cmd, ov, "--part", "eval.part", "all, train, val or test split of --data");
    Value(cmd, ov, "--split-seed", "data.split_seed", "split seed for --part");
  };

  auto* eval = app.add_subcommand("evaluate", "evaluate a checkpoint on a CSV");
  Common(eval, ov);
  mask_flags(eval);

  auto* exp = app.add_subcommand("export-masks", "write mask_<k>.csv for a checkpoint");
  Common(exp, ov);
  mask_flags(exp);

  auto* render = app.add_subcommand("render-masks", "write mask heatmaps");
  Common(render, ov);
  mask_flags(render);
  Value(render, ov, "--masks-dir", "masks_dir", "directory holding mask_<k>.csv");

  auto* explain = app.add_subcommand("explain", "compile the LLM prompt and optionally send it");
  Common(explain, ov);
  mask_flags(explain);
  Value(explain, ov, "--masks-dir", "masks_dir", "directory holding mask_<k>.csv");
  Value(explain, ov, "--dataset-name", "data.name", "dataset name (selects description files)");
  Value(explain, ov, "--description", "data.description", "dataset description text");
  Value(explain, ov, "--description-file", "data.description_file", "dataset description file");
  Value(explain, ov, "--display-names", "data.display_names", "raw=display name mapping file");
  Value(explain, ov, "--persona", "interp.persona", "persona sentence prefixed to the prompt");
  Value(explain, ov, "--policy", "interp.policy", "standard, top_k:<k> or floor:<t>[:<cap>]");
  Value(explain, ov, "--examples", "interp.examples", "in-context examples (0-2)");
  Value(explain, ov, "--rotation", "interp.rotation", "rotation into the example corpus");
  Value(explain, ov, "--corpus-dir", "interp.corpus_dir", "in-context example directory");
  Value(explain, ov, "--n-test", "interp.n_test", "sample count stated in the prompt");
  Switch(explain, ov, "--send", "llm.send", "send the prompt to the LLM endpoint");
  Value(explain, ov, "--endpoint", "llm.endpoint", "chat-completion URL");
  Value(explain, ov, "--model", "llm.model", "model name");
  Value(explain, ov, "--api-key-env", "llm.api_key_env", "environment variable holding the key");
  Value(explain, ov, "--timeout", "llm.timeout_seconds", "request timeout in seconds");
  Value(explain, ov, "--max-retries", "llm.max_retries", "retries after the first attempt");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    const KvConfig cfg = Resolve(ov);
    if (synth->parsed()) return CmdSynth(cfg);
    if (trn->parsed()) return CmdTrain(cfg);
    if (search->parsed()) return CmdSearchRm(cfg);
    if (eval->parsed()) return CmdEvaluate(cfg);
    if (exp->parsed()) return CmdExportMasks(cfg);
    if (render->parsed()) return CmdRenderMasks(cfg);
    if (explain->parsed()) return CmdExplain(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return kExitConfig;
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitTraining;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}

}  // namespace itabnet
