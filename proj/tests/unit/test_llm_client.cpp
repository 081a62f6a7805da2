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


#include <cstdlib>

#include "doctest.h"
#include "itabnet/llm_client.hpp"
#include "json.hpp"
#include "mock_llm_server.hpp"

namespace itabnet {
namespace {

constexpr const char* kKeyVar = "ITABNET_TEST_LLM_KEY";
constexpr const char* kKey = "sk-test-0123456789";

const std::string kFullReply =
    R"({"Mask 0": "Socioeconomic", "Mask 1": "Demographic", "Mask 2": "Financial", )"
    R"("Mask 3": "Occupational", "Aggregate": "Income is driven by work and family status."})";

PromptBundle Bundle() {
  PromptBundle b;
  b.text = "Describe the masks.";
  b.expected_schema = {"Mask 0", "Mask 1", "Mask 2", "Mask 3", "Aggregate"};
  return b;
}

LlmConfig Config(const testing::MockLlmServer& server) {
  setenv(kKeyVar, kKey, 1);
  LlmConfig c;
  c.endpoint = server.endpoint();
  c.api_key_env = kKeyVar;
  c.timeout_seconds = 5.0;
  c.max_retries = 3;
  c.backoff_seconds = 0.01;
  return c;
}

}  // namespace

TEST_CASE("json object extraction") {
  CHECK(extract_first_json_object("{\"a\": 1}") == std::optional<std::string>("{\"a\": 1}"));
  CHECK(extract_first_json_object("Sure! Here it is: {\"a\": \"x}\"} Thanks.") ==
        std::optional<std::string>("{\"a\": \"x}\"}"));
  CHECK(extract_first_json_object("{not json} then {\"b\": {\"c\": 2}}") ==
        std::optional<std::string>("{\"b\": {\"c\": 2}}"));
  CHECK_FALSE(extract_first_json_object("no braces here").has_value());
  CHECK_FALSE(extract_first_json_object("{ unbalanced").has_value());
}

TEST_CASE("request body shape") {
  LlmConfig c;
  c.model = "m1";
  const auto j = nlohmann::json::parse(build_chat_request(Bundle(), c));
  CHECK(j["model"] == "m1");
  CHECK(j["messages"][0]["role"] == "user");
  CHECK(j["messages"][0]["content"] == "Describe the masks.");
}

TEST_CASE("happy path returns every schema key") {
  testing::MockLlmServer server([](int) { return kFullReply; });
  const PromptBundle bundle = Bundle();
  const LlmReply r = query_llm(bundle, Config(server));
  CHECK(r.entries.size() == 5);
  CHECK(r.entries.at("Mask 2") == "Financial");
  CHECK(r.entries.at("Aggregate").find("family") != std::string::npos);
  CHECK(r.attempts == 1);
  CHECK(server.calls() == 1);
  CHECK(server.last_auth() == std::string("Bearer ") + kKey);
  CHECK(nlohmann::json::parse(server.last_body())["messages"][0]["content"] == bundle.text);
  CHECK(bundle.text == Bundle().text);
}

TEST_CASE("json embedded in prose is extracted") {
  testing::MockLlmServer server(
      [](int) { return "Here is the analysis you asked for:\n\n" + kFullReply + "\n\nLet me know!"; });
  const LlmReply r = query_llm(Bundle(), Config(server));
  CHECK(r.entries.size() == 5);
  CHECK(r.entries.at("Mask 0") == "Socioeconomic");
  CHECK(r.raw_text.rfind("Here is", 0) == 0);
}

TEST_CASE("two timeouts then success takes three attempts") {
  testing::MockLlmServer server([](int) { return kFullReply; },
                                [](int call) { return call <= 2 ? 1500 : 0; });
  LlmConfig c = Config(server);
  c.timeout_seconds = 0.3;
  const LlmReply r = query_llm(Bundle(), c);
  CHECK(r.attempts == 3);
  CHECK(server.calls() == 3);
  CHECK(r.entries.size() == 5);
}

TEST_CASE("missing schema keys raise with the parsed map") {
  testing::MockLlmServer server([](int) { return std::string(R"({"Mask 0": "a", "Mask 1": "b"})"); });
  try {
    query_llm(Bundle(), Config(server));
    FAIL("expected a schema error");
  } catch (const LlmSchemaError& e) {
    CHECK(e.reply().entries.size() == 2);
    CHECK(e.reply().entries.at("Mask 1") == "b");
    CHECK(e.missing() == std::vector<std::string>{"Mask 2", "Mask 3", "Aggregate"});
  }
}

TEST_CASE("prose without json fails after all retries with the raw text") {
  testing::MockLlmServer server([](int) { return std::string("I cannot produce a dictionary."); });
  LlmConfig c = Config(server);
  c.max_retries = 2;
  try {
    query_llm(Bundle(), c);
    FAIL("expected a parse error");
  } catch (const LlmParseError& e) {
    CHECK(e.raw_text() == "I cannot produce a dictionary.");
    CHECK(e.attempts() == 3);
  }
  CHECK(server.calls() == 3);
}

TEST_CASE("configuration errors") {
  LlmConfig c;
  c.api_key_env = "ITABNET_TEST_UNSET_KEY_VARIABLE";
  unsetenv(c.api_key_env.c_str());
  CHECK_THROWS_AS(query_llm(Bundle(), c), ConfigError);
  c.timeout_seconds = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = LlmConfig{};
  c.endpoint = "ftp://example.com";
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("transport failures do not leak the key") {
  setenv(kKeyVar, kKey, 1);
  LlmConfig c;
  c.endpoint = "http://127.0.0.1:1/v1/chat/completions";
  c.api_key_env = kKeyVar;
  c.max_retries = 1;
  c.backoff_seconds = 0.0;
  c.timeout_seconds = 1.0;
  try {
    query_llm(Bundle(), c);
    FAIL("expected a transport error");
  } catch (const LlmTransportError& e) {
    CHECK(std::string(e.what()).find(kKey) == std::string::npos);
    CHECK(std::string(e.what()).find("2 attempts") != std::string::npos);
  }
}

}  // namespace itabnet
