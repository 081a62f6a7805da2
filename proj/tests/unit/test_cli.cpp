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
#include <cstdlib>

#include "doctest.h"
#include "itabnet/cli.hpp"
#include "json.hpp"
#include "mock_llm_server.hpp"
#include "test_support.hpp"

namespace itabnet {
namespace {

using Json = nlohmann::json;

int Run(std::vector<std::string> args) { return run_cli(args); }

Json ReadJson(const std::filesystem::path& p) { return Json::parse(testing::read_file(p)); }

std::size_t CountLines(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

// A small Syn1 split plus a trained one-seed run, shared by the mask commands.
struct TrainedRun {
  testing::TempDir dir;
  TrainedRun() {
    REQUIRE(Run({"synth", "--kind", "syn1", "--n", "300", "--seed", "4", "--out-dir",
                 (dir / "data").string()}) == kExitOk);
    REQUIRE(Run({"train", "--train", (dir / "data/train.csv").string(), "--test",
                 (dir / "data/test.csv").string(), "--epochs", "2", "--steps", "3", "--seeds", "2",
                 "--set", "model.n_d=8", "--out-dir", (dir / "run").string()}) == kExitOk);
  }
};

}  // namespace

TEST_CASE("synth writes the requested rows deterministically") {
  testing::TempDir dir;
  REQUIRE(Run({"synth", "--kind", "syn4", "--n", "50", "--seed", "9", "--out-dir", (dir / "a").string()}) ==
          kExitOk);
  REQUIRE(Run({"synth", "--kind", "syn4", "--n", "50", "--seed", "9", "--out-dir", (dir / "b").string()}) ==
          kExitOk);
  const std::string train = testing::read_file(dir / "a/train.csv");
  CHECK(CountLines(train) == 51);
  CHECK(train.rfind("f0,f1,f2,f3,f4,f5,f6,f7,f8,f9,f10,y\n", 0) == 0);
  CHECK(CountLines(testing::read_file(dir / "a/test.csv")) == 51);
  CHECK(train == testing::read_file(dir / "b/train.csv"));
  CHECK(testing::read_file(dir / "a/ground_truth.csv") == testing::read_file(dir / "b/ground_truth.csv"));
  CHECK(CountLines(testing::read_file(dir / "a/ground_truth.csv")) == 101);
  const Json s = ReadJson(dir / "a/summary.json");
  CHECK(s["kind"] == "syn4");
  CHECK(s["n_train"] == 50);
}

TEST_CASE("configuration errors exit with code 2") {
  testing::TempDir dir;
  CHECK(Run({"synth", "--kind", "syn9", "--out-dir", dir.path().string()}) == kExitConfig);
  CHECK(Run({"train", "--train", (dir / "missing.csv").string(), "--out-dir", dir.path().string()}) ==
        kExitConfig);
  CHECK(Run({"train", "--out-dir", dir.path().string()}) == kExitConfig);
  CHECK(Run({"frobnicate"}) == kExitConfig);
  CHECK(Run({"synth", "--set", "novalue"}) == kExitConfig);
  testing::write_file(dir / "bad.conf", "this is not a pair\n");
  CHECK(Run({"synth", "--config", (dir / "bad.conf").string()}) == kExitConfig);
  testing::write_file(dir / "blocker", "x");
  CHECK(Run({"synth", "--n", "10", "--out-dir", (dir / "blocker" / "out").string()}) == kExitConfig);
  CHECK(Run({"synth", "--help"}) == kExitOk);
}

TEST_CASE("config file values are overridden by flags") {
  testing::TempDir dir;
  testing::write_file(dir / "c.conf", "[synth]\nkind = syn2\nn = 20\n");
  REQUIRE(Run({"synth", "--config", (dir / "c.conf").string(), "--n", "30", "--out-dir",
               dir.path().string()}) == kExitOk);
  const Json s = ReadJson(dir / "summary.json");
  CHECK(s["kind"] == "syn2");
  CHECK(s["n_train"] == 30);
}

TEST_CASE("train, export, render and explain") {
  TrainedRun run;
  const auto& dir = run.dir;
  const Json s = ReadJson(dir / "run/summary.json");
  CHECK(s["test_accuracy"]["values"].size() == 2);
  CHECK(s["n_steps"] == 3);
  CHECK(s.contains("test_auc"));
  CHECK(std::filesystem::is_regular_file(dir / "run/model.ckpt"));
  CHECK(std::filesystem::is_regular_file(dir / "run/mask_2.csv"));
  CHECK(CountLines(testing::read_file(dir / "run/metrics.jsonl")) >= 4);
  CHECK(std::filesystem::is_regular_file(dir / "run/timings.json"));

  REQUIRE(Run({"evaluate", "--checkpoint", (dir / "run/model.ckpt").string(), "--data",
               (dir / "data/test.csv").string(), "--out-dir", (dir / "eval").string()}) == kExitOk);
  const Json e = ReadJson(dir / "eval/summary.json");
  CHECK(e["n_rows"] == 300);

  REQUIRE(Run({"export-masks", "--checkpoint", (dir / "run/model.ckpt").string(), "--data",
               (dir / "data/test.csv").string(), "--out-dir", (dir / "masks").string()}) == kExitOk);
  CHECK(CountLines(testing::read_file(dir / "masks/mask_0.csv")) == 301);
  CHECK_FALSE(std::filesystem::exists(dir / "masks/mask_3.csv"));

  REQUIRE(Run({"render-masks", "--masks-dir", (dir / "masks").string(), "--out-dir",
               (dir / "png").string()}) == kExitOk);
  CHECK(std::filesystem::is_regular_file(dir / "png/stacked_pairs.png"));

  REQUIRE(Run({"explain", "--masks-dir", (dir / "masks").string(), "--dataset-name", "syn1",
               "--description", "Synthetic data.", "--examples", "0", "--out-dir",
               (dir / "explain").string()}) == kExitOk);
  const std::string prompt = testing::read_file(dir / "explain/prompt.txt");
  CHECK(prompt.find("At the 0th step of feature selection") != std::string::npos);
  CHECK(prompt.find("Synthetic data.") != std::string::npos);

  REQUIRE(Run({"explain", "--masks-dir", (dir / "masks").string(), "--description", "d",
               "--persona", "Assume you are a Physician.", "--out-dir", (dir / "persona").string()}) ==
          kExitOk);
  CHECK(testing::read_file(dir / "persona/prompt.txt").rfind("Assume you are a Physician. ", 0) == 0);
}

TEST_CASE("explain --send against a local endpoint") {
  TrainedRun run;
  const auto& dir = run.dir;
  const std::string masks = (dir / "run").string();
  const auto base = [&](const std::string& endpoint, const std::string& out) {
    return std::vector<std::string>{"explain", "--masks-dir", masks, "--description", "d",
                                    "--examples", "0", "--send", "--endpoint", endpoint,
                                    "--api-key-env", "ITABNET_TEST_CLI_KEY", "--max-retries", "1",
                                    "--timeout", "5", "--set", "llm.backoff_seconds=0", "--out-dir",
                                    (dir / out).string()};
  };

  ::unsetenv("ITABNET_TEST_CLI_KEY");
  CHECK(Run(base("http://127.0.0.1:9/v1/chat/completions", "nokey")) == kExitConfig);
  CHECK_FALSE(std::filesystem::exists(dir / "nokey/prompt.txt"));

  ::setenv("ITABNET_TEST_CLI_KEY", "cli-secret", 1);
  {
    testing::MockLlmServer server([](int) {
      return std::string(
          R"(Here you go: {"Mask 0": "a", "Mask 1": "b", "Mask 2": "c", "Aggregate": "all"})");
    });
    REQUIRE(Run(base(server.endpoint(), "ok")) == kExitOk);
    const Json j = ReadJson(dir / "ok/interpretation.json");
    CHECK(j.size() == 4);
    CHECK(j["Aggregate"] == "all");
    CHECK(server.last_auth() == "Bearer cli-secret");
  }
  {
    testing::MockLlmServer server([](int) { return std::string("no dictionary today"); });
    CHECK(Run(base(server.endpoint(), "prose")) == kExitLlm);
    CHECK(server.calls() == 2);
    CHECK(testing::read_file(dir / "prose/interpretation_raw.txt") == "no dictionary today");
  }
  {
    testing::MockLlmServer server([](int) { return std::string(R"({"Mask 0": "a"})"); });
    CHECK(Run(base(server.endpoint(), "partial")) == kExitLlm);
    CHECK(ReadJson(dir / "partial/interpretation.json")["Mask 0"] == "a");
  }
  ::unsetenv("ITABNET_TEST_CLI_KEY");
}

TEST_CASE("search-rm with a scripted trainer") {
  testing::TempDir dir;
  testing::write_file(dir / "script.txt",
                      "# r_m accuracy verdict\n0 0.90 fail\n10 0.88 fail\n100 0.86 pass\n1000 0.87 pass\n");
  REQUIRE(Run({"search-rm", "--range", "0", "1000", "--epsilon", "2", "--dry-run-script",
               (dir / "script.txt").string(), "--out-dir", dir.path().string()}) == kExitOk);
  const Json r = ReadJson(dir / "search_report.json");
  CHECK(r["feasible"] == true);
  CHECK(r["chosen_r_m"] == 1000.0);
  CHECK(r["trainer_calls"] == 4);
  CHECK(r["candidates"] == Json::array({0.0, 10.0, 100.0, 1000.0}));
  CHECK(r["recursed"] == false);

  testing::write_file(dir / "none.txt", "0 0.9 fail\n10 0.9 fail\n100 0.9 fail\n1000 0.9 fail\n");
  CHECK(Run({"search-rm", "--range", "0", "1000", "--dry-run-script", (dir / "none.txt").string(),
             "--out-dir", (dir / "none").string()}) == kExitInfeasible);
  CHECK(ReadJson(dir / "none/search_report.json")["feasible"] == false);

  testing::write_file(dir / "short.txt", "0 0.9 fail\n");
  CHECK(Run({"search-rm", "--range", "0", "1000", "--dry-run-script", (dir / "short.txt").string(),
             "--out-dir", (dir / "short").string()}) == kExitConfig);
}

}  // namespace itabnet
