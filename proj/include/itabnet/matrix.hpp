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
#include <span>
#include <vector>

namespace itabnet {

// Row-major dense matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  void fill(double v);
  void resize(std::size_t rows, std::size_t cols, double fill = 0.0);

  bool all_finite() const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Kernel-dispatched helpers. Shapes are checked and throw ShapeError.
// out = a * b^T (+ out)
void matmul_nt(const Matrix& a, const Matrix& b, Matrix& out, bool accumulate = false);
// out = a * b (+ out)
void matmul_nn(const Matrix& a, const Matrix& b, Matrix& out, bool accumulate = false);
// out = a^T * b (+ out)
void matmul_tn(const Matrix& a, const Matrix& b, Matrix& out, bool accumulate = false);

// Rows [first, first + count) as a new matrix.
Matrix slice_rows(const Matrix& m, std::size_t first, std::size_t count);
Matrix gather_rows(const Matrix& m, std::span<const std::size_t> rows);
// Columns [first, first + count).
Matrix slice_cols(const Matrix& m, std::size_t first, std::size_t count);
// [a | b]
Matrix hconcat(const Matrix& a, const Matrix& b);

}  // namespace itabnet
