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


#include "itabnet/llm_client.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace itabnet {
namespace {

struct Endpoint {
  std::string scheme_host_port;
  std::string path;
};

Endpoint SplitUrl(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("LLM endpoint must be an http(s) URL");
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw ConfigError("LLM endpoint must use http or https");
  }
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (scheme == "https") throw ConfigError("this build has no HTTPS support");
#endif
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

// Scans for a balanced object starting at `open`, honoring JSON strings.
std::optional<std::size_t> MatchBrace(const std::string& text, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = open; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}' && --depth == 0) {
      return i;
    }
  }
  return std::nullopt;
}

std::string MessageContent(const std::string& body) {
  const auto j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded()) return body;
  try {
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    return body;
  }
}

}  // namespace

void LlmConfig::validate() const {
  SplitUrl(endpoint);
  if (!(timeout_seconds > 0.0)) throw ConfigError("LLM timeout must be positive");
  if (max_retries < 0) throw ConfigError("max_retries must be non-negative");
  if (!(backoff_seconds >= 0.0)) throw ConfigError("backoff must be non-negative");
  if (api_key_env.empty()) throw ConfigError("api key environment variable name is empty");
}

std::optional<std::string> extract_first_json_object(const std::string& text) {
  for (std::size_t i = text.find('{'); i != std::string::npos; i = text.find('{', i + 1)) {
    const auto close = MatchBrace(text, i);
    if (!close) continue;
    std::string candidate = text.substr(i, *close - i + 1);
    const auto j = nlohmann::json::parse(candidate, nullptr, false);
    if (!j.is_discarded() && j.is_object()) return candidate;
  }
  return std::nullopt;
}

std::string build_chat_request(const PromptBundle& bundle, const LlmConfig& cfg) {
  nlohmann::ordered_json body;
  body["model"] = cfg.model;
  body["messages"] = nlohmann::ordered_json::array(
      {nlohmann::ordered_json{{"role", "user"}, {"content", bundle.text}}});
  body["temperature"] = cfg.temperature;
  return body.dump();
}

LlmReply query_llm(const PromptBundle& bundle, const LlmConfig& cfg) {
  cfg.validate();
  const char* key = std::getenv(cfg.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw ConfigError("environment variable " + cfg.api_key_env + " is not set");
  }
  const Endpoint ep = SplitUrl(cfg.endpoint);
  const std::string request = build_chat_request(bundle, cfg);
  const auto timeout = std::chrono::duration<double>(cfg.timeout_seconds);
  const auto timeout_us = std::chrono::duration_cast<std::chrono::microseconds>(timeout);

  const int attempts = 1 + cfg.max_retries;
  std::string last_error;
  std::string last_text;
  bool got_text = false;
  double backoff = cfg.backoff_seconds;
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
      backoff *= 2.0;
    }
    httplib::Client client(ep.scheme_host_port);
    client.set_connection_timeout(timeout_us.count() / 1000000, timeout_us.count() % 1000000);
    client.set_read_timeout(timeout_us.count() / 1000000, timeout_us.count() % 1000000);
    client.set_write_timeout(timeout_us.count() / 1000000, timeout_us.count() % 1000000);
    client.set_bearer_token_auth(key);
    auto res = client.Post(ep.path, request, "application/json");
    if (!res) {
      last_error = "request failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      throw LlmTransportError("LLM endpoint returned HTTP " + std::to_string(res->status));
    }
    last_text = MessageContent(res->body);
    got_text = true;
    const auto object = extract_first_json_object(last_text);
    if (!object) {
      last_error = "reply contained no JSON object";
      continue;
    }
    LlmReply reply;
    reply.raw_text = last_text;
    reply.attempts = attempt;
    const nlohmann::json parsed = nlohmann::json::parse(*object);
    for (const auto& [k, v] : parsed.items()) {
      reply.entries[k] = v.is_string() ? v.get<std::string>() : v.dump();
    }
    std::vector<std::string> missing;
    for (const auto& k : bundle.expected_schema) {
      if (!reply.entries.count(k)) missing.push_back(k);
    }
    if (!missing.empty()) {
      std::string list;
      for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
      throw LlmSchemaError("LLM reply is missing keys: " + list, std::move(reply),
                           std::move(missing));
    }
    return reply;
  }
  if (got_text) {
    throw LlmParseError("LLM reply contained no JSON object after " + std::to_string(attempts) +
                            " attempts",
                        last_text, attempts);
  }
  throw LlmTransportError("LLM request failed after " + std::to_string(attempts) +
                          " attempts (" + last_error + ")");
}

}  // namespace itabnet
