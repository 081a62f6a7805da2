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

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "itabnet/kernels.hpp"

namespace itabnet::kernels {

#ifndef ITABNET_HAVE_AVX2
const KernelTable* avx2_kernels() { return nullptr; }
#endif

namespace {

bool CpuHasAvx2() {
#if defined(ITABNET_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& TableFor(Isa isa) {
  if (isa == Isa::kAvx2 && avx2_kernels() != nullptr) return *avx2_kernels();
  return scalar_kernels();
}

Isa InitialIsa() {
  if (const char* env = std::getenv("ITABNET_ISA")) {
    const std::string v(env);
    if (v == "scalar") return Isa::kScalar;
    if (v == "avx2" && CpuHasAvx2()) return Isa::kAvx2;
  }
  return detect_isa();
}

std::atomic<const KernelTable*>& Current() {
  static std::atomic<const KernelTable*> current{&TableFor(InitialIsa())};
  return current;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

Isa detect_isa() { return CpuHasAvx2() ? Isa::kAvx2 : Isa::kScalar; }

bool isa_supported(Isa isa) {
  return isa == Isa::kScalar || (isa == Isa::kAvx2 && CpuHasAvx2());
}

const KernelTable& active() { return *Current().load(std::memory_order_acquire); }

void set_active_isa(Isa isa) {
  if (!isa_supported(isa)) {
    throw std::invalid_argument("kernel variant not supported on this CPU: " +
                                std::string(isa_name(isa)));
  }
  Current().store(&TableFor(isa), std::memory_order_release);
}

Isa active_isa() { return active().isa; }

}  // namespace itabnet::kernels
