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

#include "itabnet/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "itabnet/errors.hpp"
#include "itabnet/kernels.hpp"

namespace itabnet {
namespace {

std::string Dims(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

void Matrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

void Matrix::resize(std::size_t rows, std::size_t cols, double fill) {
  rows_ = rows;
  cols_ = cols;
  data_.assign(rows * cols, fill);
}

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

void matmul_nt(const Matrix& a, const Matrix& b, Matrix& out, bool accumulate) {
  if (a.cols() != b.cols()) {
    throw ShapeError("matmul_nt: inner dimensions differ: " + Dims(a) + " vs " +
                     Dims(b));
  }
  if (!accumulate) {
    out.resize(a.rows(), b.rows());
  } else if (out.rows() != a.rows() || out.cols() != b.rows()) {
    throw ShapeError("matmul_nt: accumulator shape " + Dims(out));
  }
  kernels::active().gemm_nt(a.data(), b.data(), out.data(), a.rows(), b.rows(),
                            a.cols(), accumulate);
}

void matmul_nn(const Matrix& a, const Matrix& b, Matrix& out, bool accumulate) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul_nn: inner dimensions differ: " + Dims(a) + " vs " +
                     Dims(b));
  }
  if (!accumulate) {
    out.resize(a.rows(), b.cols());
  } else if (out.rows() != a.rows() || out.cols() != b.cols()) {
    throw ShapeError("matmul_nn: accumulator shape " + Dims(out));
  }
  kernels::active().gemm_nn(a.data(), b.data(), out.data(), a.rows(), b.cols(),
                            a.cols(), accumulate);
}

void matmul_tn(const Matrix& a, const Matrix& b, Matrix& out, bool accumulate) {
  if (a.rows() != b.rows()) {
    throw ShapeError("matmul_tn: inner dimensions differ: " + Dims(a) + " vs " +
                     Dims(b));
  }
  if (!accumulate) {
    out.resize(a.cols(), b.cols());
  } else if (out.rows() != a.cols() || out.cols() != b.cols()) {
    throw ShapeError("matmul_tn: accumulator shape " + Dims(out));
  }
  kernels::active().gemm_tn(a.data(), b.data(), out.data(), a.cols(), b.cols(),
                            a.rows(), accumulate);
}

Matrix slice_rows(const Matrix& m, std::size_t first, std::size_t count) {
  if (first + count > m.rows()) throw ShapeError("slice_rows out of range");
  Matrix out(count, m.cols());
  if (count > 0) {
    std::memcpy(out.data(), m.data() + first * m.cols(),
                sizeof(double) * count * m.cols());
  }
  return out;
}

Matrix gather_rows(const Matrix& m, std::span<const std::size_t> rows) {
  Matrix out(rows.size(), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= m.rows()) throw ShapeError("gather_rows index out of range");
    std::memcpy(out.data() + i * m.cols(), m.data() + rows[i] * m.cols(),
                sizeof(double) * m.cols());
  }
  return out;
}

Matrix slice_cols(const Matrix& m, std::size_t first, std::size_t count) {
  if (first + count > m.cols()) throw ShapeError("slice_cols out of range");
  Matrix out(m.rows(), count);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    std::memcpy(out.data() + r * count, m.data() + r * m.cols() + first,
                sizeof(double) * count);
  }
  return out;
}

Matrix hconcat(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw ShapeError("hconcat: row counts differ");
  Matrix out(a.rows(), a.cols() + b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    std::memcpy(out.data() + r * out.cols(), a.data() + r * a.cols(),
                sizeof(double) * a.cols());
    std::memcpy(out.data() + r * out.cols() + a.cols(), b.data() + r * b.cols(),
                sizeof(double) * b.cols());
  }
  return out;
}

}  // namespace itabnet
