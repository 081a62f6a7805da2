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

#include <cstddef>
#include <string_view>

// Dense double-precision kernels used by the encoder's inner loops.
//
// Every kernel has a scalar reference implementation. Vector variants live in
// their own translation units, compiled with the matching target flags, and
// are picked once at startup from the CPU's feature bits. All matrices are
// row-major and contiguous.
namespace itabnet::kernels {

enum class Isa { kScalar, kAvx2 };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;

  double (*dot)(const double* x, const double* y, std::size_t n);
  // y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // out = x * y (elementwise)
  void (*mul)(const double* x, const double* y, double* out, std::size_t n);
  // sum of squares
  double (*sumsq)(const double* x, std::size_t n);

  // c (m x n) = a (m x k) * b(n x k)^T, added into c when accumulate is set.
  void (*gemm_nt)(const double* a, const double* b, double* c, std::size_t m,
                  std::size_t n, std::size_t k, bool accumulate);
  // c (m x n) = a (m x k) * b (k x n)
  void (*gemm_nn)(const double* a, const double* b, double* c, std::size_t m,
                  std::size_t n, std::size_t k, bool accumulate);
  // c (m x n) = a(k x m)^T * b (k x n)
  void (*gemm_tn)(const double* a, const double* b, double* c, std::size_t m,
                  std::size_t n, std::size_t k, bool accumulate);
};

const KernelTable& scalar_kernels();
// nullptr when the variant was not compiled in.
const KernelTable* avx2_kernels();

// Best variant the running CPU supports.
Isa detect_isa();
bool isa_supported(Isa isa);

// Table used by the rest of the library. Defaults to detect_isa(); the
// ITABNET_ISA environment variable ("scalar" or "avx2") overrides it.
const KernelTable& active();
// Throws std::invalid_argument if the CPU cannot run `isa`.
void set_active_isa(Isa isa);
Isa active_isa();

// Scoped override, restores the previous selection on destruction.
class ScopedIsa {
 public:
  explicit ScopedIsa(Isa isa) : previous_(active_isa()) { set_active_isa(isa); }
  ~ScopedIsa() { set_active_isa(previous_); }
  ScopedIsa(const ScopedIsa&) = delete;
  ScopedIsa& operator=(const ScopedIsa&) = delete;

 private:
  Isa previous_;
};

}  // namespace itabnet::kernels
