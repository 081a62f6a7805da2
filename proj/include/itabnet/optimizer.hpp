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
#include <vector>

#include "itabnet/model.hpp"

namespace itabnet {

struct AdamConfig {
  double learning_rate = 0.02;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adam without weight decay. Non-trainable parameters are left untouched.
class Adam {
 public:
  Adam(const std::vector<Param>& params, AdamConfig cfg);

  void step(std::vector<Param>& params, const Gradients& grads);
  std::uint64_t steps_taken() const { return t_; }

 private:
  AdamConfig cfg_;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
  std::uint64_t t_ = 0;
};

// Rescales grads so their global L2 norm is at most max_norm. Returns the
// norm before clipping.
double clip_grad_norm(Gradients& grads, double max_norm);

}  // namespace itabnet
