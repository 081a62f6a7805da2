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

#include <string>
#include <vector>

namespace itabnet {

// Stable process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitRuntime = 1,     // I/O or transport failures outside the classes below
  kExitConfig = 2,      // usage, config, schema and input errors
  kExitTraining = 3,    // a training run aborted on divergence
  kExitInfeasible = 4,  // r_M search found no passing candidate
  kExitLlm = 5,         // LLM reply unparseable or missing schema keys
};

// Entry point of the `itabnet` tool; args excludes the program name.
int run_cli(const std::vector<std::string>& args);

}  // namespace itabnet
