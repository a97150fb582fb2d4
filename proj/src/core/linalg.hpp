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

#ifndef SIGNMUON_CORE_LINALG_HPP
#define SIGNMUON_CORE_LINALG_HPP

#include <cstdint>
#include <vector>

#include "core/matrix.hpp"
#include "core/signs.hpp"

namespace signmuon::linalg {

struct NormReport {
  double frobenius = 0.0;
  double entrywise_l1 = 0.0;
  double spectral = 0.0;
  double nuclear = 0.0;
};

enum class NsScale { kSpectral, kFro };
enum class ZeroSignPolicy { kZero, kPlusOne };

// Thin SVD, X = U diag(sigma) V^T with k = min(rows, cols) columns and
// sigma sorted descending. One-sided Jacobi with cyclic sweeps; converged
// when every off-diagonal Gram entry is below 1e-12 * ||X||_F^2.
struct SvdResult {
  DenseMatrix u;              // rows x k, orthonormal columns (zero where sigma is 0)
  std::vector<double> sigma;  // k, nonnegative, descending
  DenseMatrix v;              // cols x k, orthonormal columns
};
SvdResult svd_jacobi(const DenseMatrix& x);

// All four norms; spectral and nuclear via the SVD oracle.
NormReport norms(const DenseMatrix& a);

// Alternating power iteration estimate of ||X||_op. Start vector is a seeded
// uniform direction (normalized i.i.d. normals); the estimate never exceeds
// the true spectral norm and is deterministic given the seed.
double power_iter_spectral(const DenseMatrix& x, int iters, double eps, std::uint64_t seed);

// Raw cubic iteration Y <- 1/2 Y (3I - Y^T Y), exactly `iters` times.
// Callers are responsible for scaling Y0 so its singular values lie in
// (0, sqrt(3)). Wide inputs (rows < cols) are iterated transposed so the Gram
// matrix stays min-side.
DenseMatrix newton_schulz_iterate(const DenseMatrix& y0, int iters);

// Scaled Newton-Schulz polar approximation: sigma from the power iteration
// (spectral) or the Frobenius norm, Y0 = X / max(sigma, eps), then `iters`
// cubic steps. Zero input returns zero.
DenseMatrix polar_newton_schulz(const DenseMatrix& x, int iters, double eps, NsScale scale,
                                int power_iters, std::uint64_t seed);

// Exact polar factor U V^T from the thin SVD. Throws on the zero matrix.
DenseMatrix polar_svd(const DenseMatrix& x);

// Entrywise sign; zero entries map per policy.
SignMatrix sign_entrywise(const DenseMatrix& a, ZeroSignPolicy policy);

// ||I - G||_op where G is the min-side Gram matrix of y (Y^T Y for tall y,
// Y Y^T for wide). Convergence measure for the Newton-Schulz iteration.
double gram_residual(const DenseMatrix& y);

}  // namespace signmuon::linalg

#endif  // SIGNMUON_CORE_LINALG_HPP
