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


#include "doctest.h"
#include "itabnet/errors.hpp"
#include "itabnet/kv_config.hpp"
#include "test_support.hpp"

namespace itabnet {

TEST_CASE("sectioned keys, comments and overrides") {
  const KvConfig c = KvConfig::parse(
      "# adult run\n"
      "model.n_steps = 4\n"
      "[train]\n"
      "r_m = 9   # sparsity weight\n"
      "seed=3\n"
      "[interp]\n"
      "persona = \"Assume that you are an Economist. # not a comment\"\n"
      "train.r_m = 10\n");
  CHECK(c.get_int("model.n_steps", 0) == 4);
  CHECK(c.get_double("train.r_m", 0) == 9.0);
  CHECK(c.get_u64("train.seed", 0) == 3);
  CHECK(c.get_string("interp.persona", "") == "Assume that you are an Economist. # not a comment");
  CHECK(c.has("interp.train.r_m"));
  CHECK(c.get_int("model.n_d", 16) == 16);

  KvConfig o = c;
  o.set("train.r_m", "1000");
  CHECK(o.get_double("train.r_m", 0) == 1000.0);
}

TEST_CASE("typed getters reject bad values") {
  const KvConfig c = KvConfig::parse("a = 1.5x\nb = two\nc = maybe\nd = -1\ne = on\n");
  CHECK_THROWS_AS(c.get_double("a", 0), ConfigError);
  CHECK_THROWS_AS(c.get_int("b", 0), ConfigError);
  CHECK_THROWS_AS(c.get_bool("c", false), ConfigError);
  CHECK_THROWS_AS(c.get_u64("d", 0), ConfigError);
  CHECK(c.get_int("d", 0) == -1);
  CHECK(c.get_bool("e", false));
}

TEST_CASE("malformed files and unused keys") {
  CHECK_THROWS_AS(KvConfig::parse("just words\n"), ConfigError);
  CHECK_THROWS_AS(KvConfig::parse("[open\n"), ConfigError);
  CHECK_THROWS_AS(KvConfig::parse(" = 3\n"), ConfigError);
  CHECK_THROWS_AS(KvConfig::load("/nonexistent/itabnet.conf"), IoError);
  testing::TempDir dir;
  testing::write_file(dir / "c.conf", "x.a = 1\nx.b = 2\n");
  const KvConfig c = KvConfig::load(dir / "c.conf");
  CHECK(c.get_int("x.a", 0) == 1);
  CHECK(c.unused_keys() == std::vector<std::string>{"x.b"});
  CHECK(c.keys().size() == 2);
}

}  // namespace itabnet
