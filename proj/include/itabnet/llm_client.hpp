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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "itabnet/errors.hpp"
#include "itabnet/prompt.hpp"

namespace itabnet {

struct LlmConfig {
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string model = "gpt-4-1106-preview";
  std::string api_key_env = "INTERPRETABNET_LLM_API_KEY";
  double timeout_seconds = 120.0;
  // Attempts = 1 + max_retries.
  int max_retries = 3;
  double backoff_seconds = 1.0;  // doubled after each failed attempt
  double temperature = 0.0;

  void validate() const;
};

struct LlmReply {
  // Every key of the extracted object; non-string values are kept as JSON.
  std::map<std::string, std::string> entries;
  std::string raw_text;  // model message content
  int attempts = 0;
};

// The model text never contained a JSON object, after all attempts.
class LlmParseError : public Error {
 public:
  LlmParseError(const std::string& what, std::string raw_text, int attempts)
      : Error(what), raw_text_(std::move(raw_text)), attempts_(attempts) {}
  const std::string& raw_text() const { return raw_text_; }
  int attempts() const { return attempts_; }

 private:
  std::string raw_text_;
  int attempts_;
};

// The reply parsed but lacks schema keys; the parsed reply is kept.
class LlmSchemaError : public SchemaError {
 public:
  LlmSchemaError(const std::string& what, LlmReply reply, std::vector<std::string> missing)
      : SchemaError(what), reply_(std::move(reply)), missing_(std::move(missing)) {}
  const LlmReply& reply() const { return reply_; }
  const std::vector<std::string>& missing() const { return missing_; }

 private:
  LlmReply reply_;
  std::vector<std::string> missing_;
};

// Transport or HTTP failure that outlived the retries.
class LlmTransportError : public IoError {
 public:
  using IoError::IoError;
};

// First balanced {...} in text that parses as a JSON object.
std::optional<std::string> extract_first_json_object(const std::string& text);

// OpenAI-style chat-completion request body.
std::string build_chat_request(const PromptBundle& bundle, const LlmConfig& cfg);

// POSTs the prompt with a bearer token read from cfg.api_key_env. Transport
// errors, 429/5xx responses and replies without a JSON object are retried
// with exponential backoff. Throws ConfigError when the key variable is
// unset, LlmTransportError, LlmParseError, or LlmSchemaError when keys from
// bundle.expected_schema are missing.
LlmReply query_llm(const PromptBundle& bundle, const LlmConfig& cfg);

}  // namespace itabnet
