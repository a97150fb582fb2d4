// Copyright 2026 The signmuon Authors. All Rights Reserved.
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
// =============================================================================

#ifndef SIGNMUON_CORE_MATRIX_HPP
#define SIGNMUON_CORE_MATRIX_HPP

#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "core/rng.hpp"

namespace signmuon {

// Dense real matrix, row-major, double precision. The universal carrier for
// parameter blocks, gradients, momentum buffers and update directions.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(int rows, int cols);  // zero-initialized
  DenseMatrix(int rows, int cols, std::vector<double> data);
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static DenseMatrix identity(int n);
  static DenseMatrix diag(std::initializer_list<double> entries);
  static DenseMatrix gaussian(int rows, int cols, Rng& rng, double scale = 1.0);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::int64_t size() const { return static_cast<std::int64_t>(rows_) * cols_; }

  double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  bool same_shape(const DenseMatrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  bool all_finite() const;

  DenseMatrix& operator+=(const DenseMatrix& other);
  DenseMatrix& operator-=(const DenseMatrix& other);
  DenseMatrix& operator*=(double s);

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b);
DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b);
DenseMatrix operator*(double s, DenseMatrix a);

DenseMatrix transpose(const DenseMatrix& a);
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
// y += alpha * x, shapes must agree.
void axpy(double alpha, const DenseMatrix& x, DenseMatrix& y);
double frobenius_norm(const DenseMatrix& a);
double entrywise_l1(const DenseMatrix& a);
// Frobenius inner product tr(a^T b).
double dot(const DenseMatrix& a, const DenseMatrix& b);
bool bitwise_equal(const DenseMatrix& a, const DenseMatrix& b);
// FNV-1a over the raw bytes; used for replica-consistency checks.
std::uint64_t content_hash(const DenseMatrix& a);

// Throws std::invalid_argument naming `what` if a contains NaN/Inf.
void require_finite(const DenseMatrix& a, const char* what);
// Throws std::invalid_argument if shapes differ.
void require_same_shape(const DenseMatrix& a, const DenseMatrix& b, const char* what);

}  // namespace signmuon

#endif  // SIGNMUON_CORE_MATRIX_HPP
