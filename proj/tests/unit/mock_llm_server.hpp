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

#include <atomic>
#include <chrono>
#include <functional>
#include <string>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace itabnet::testing {

// Local chat-completion endpoint. The reply function gets the 1-based
// request count and returns the assistant message content; a negative
// delay_ms makes the server stall past any client timeout.
class MockLlmServer {
 public:
  using Reply = std::function<std::string(int call)>;
  using Delay = std::function<int(int call)>;

  explicit MockLlmServer(Reply reply, Delay delay = {})
      : reply_(std::move(reply)), delay_(std::move(delay)) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      const int call = ++calls_;
      last_auth_ = req.get_header_value("Authorization");
      last_body_ = req.body;
      const int wait = delay_ ? delay_(call) : 0;
      if (wait > 0) std::this_thread::sleep_for(std::chrono::milliseconds(wait));
      nlohmann::json body;
      body["id"] = "mock";
      body["choices"] = nlohmann::json::array(
          {{{"index", 0}, {"message", {{"role", "assistant"}, {"content", reply_(call)}}}}});
      res.set_content(body.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~MockLlmServer() {
    server_.stop();
    thread_.join();
  }

  std::string endpoint() const {
    return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
  }
  int calls() const { return calls_; }
  std::string last_auth() const { return last_auth_; }
  std::string last_body() const { return last_body_; }

 private:
  Reply reply_;
  Delay delay_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  std::atomic<int> calls_{0};
  std::string last_auth_;
  std::string last_body_;
};

}  // namespace itabnet::testing
