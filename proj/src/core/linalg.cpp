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

#include "core/linalg.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace signmuon::linalg {

namespace {

// One-sided Jacobi on a tall matrix (rows >= cols): post-multiplies plane
// rotations until the columns are orthogonal, accumulating them into V.
// On return A = U diag(sigma) and X = A V^T.
struct JacobiState {
  DenseMatrix a;
  DenseMatrix v;
};

void one_sided_jacobi(JacobiState& s, double off_tol) {
  const int n = s.a.cols();
  const int m = s.a.rows();
  const int max_sweeps = 64;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool converged = true;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double app = 0.0, aqq = 0.0, apq = 0.0;
        for (int i = 0; i < m; ++i) {
          const double x = s.a(i, p);
          const double y = s.a(i, q);
          app += x * x;
          aqq += y * y;
          apq += x * y;
        }
        if (std::fabs(apq) <= off_tol) continue;
        converged = false;
        const double zeta = (aqq - app) / (2.0 * apq);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = c * t;
        for (int i = 0; i < m; ++i) {
          const double x = s.a(i, p);
          const double y = s.a(i, q);
          s.a(i, p) = c * x - sn * y;
          s.a(i, q) = sn * x + c * y;
        }
        for (int i = 0; i < n; ++i) {
          const double x = s.v(i, p);
          const double y = s.v(i, q);
          s.v(i, p) = c * x - sn * y;
          s.v(i, q) = sn * x + c * y;
        }
      }
    }
    if (converged) break;
  }
}

}  // namespace

SvdResult svd_jacobi(const DenseMatrix& x) {
  require_finite(x, "svd_jacobi");
  const bool wide = x.rows() < x.cols();
  JacobiState s{wide ? transpose(x) : x, DenseMatrix::identity(wide ? x.rows() : x.cols())};

  const double fro2 = frobenius_norm(s.a);
  one_sided_jacobi(s, 1e-12 * fro2 * fro2);

  const int m = s.a.rows();
  const int k = s.a.cols();
  std::vector<double> sigma(k);
  for (int j = 0; j < k; ++j) {
    double ss = 0.0;
    for (int i = 0; i < m; ++i) ss += s.a(i, j) * s.a(i, j);
    sigma[j] = std::sqrt(ss);
  }

  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return sigma[a] > sigma[b]; });

  DenseMatrix u(m, k);
  DenseMatrix v(s.v.rows(), k);
  std::vector<double> sorted(k);
  for (int jj = 0; jj < k; ++jj) {
    const int j = order[jj];
    sorted[jj] = sigma[j];
    if (sigma[j] > 0.0) {
      for (int i = 0; i < m; ++i) u(i, jj) = s.a(i, j) / sigma[j];
    }
    for (int i = 0; i < v.rows(); ++i) v(i, jj) = s.v(i, j);
  }

  // The sweep tolerance leaves left vectors of small singular values with
  // relative cross-talk; a Gram-Schmidt pass restores orthonormality without
  // touching sigma. V is a product of plane rotations and is already clean.
  for (int jj = 0; jj < k; ++jj) {
    if (sorted[jj] == 0.0) continue;
    for (int pp = 0; pp < jj; ++pp) {
      double proj = 0.0;
      for (int i = 0; i < m; ++i) proj += u(i, pp) * u(i, jj);
      for (int i = 0; i < m; ++i) u(i, jj) -= proj * u(i, pp);
    }
    double nn = 0.0;
    for (int i = 0; i < m; ++i) nn += u(i, jj) * u(i, jj);
    nn = std::sqrt(nn);
    if (nn > 0.0)
      for (int i = 0; i < m; ++i) u(i, jj) /= nn;
  }

  if (wide) return {std::move(v), std::move(sorted), std::move(u)};
  return {std::move(u), std::move(sorted), std::move(v)};
}

NormReport norms(const DenseMatrix& a) {
  require_finite(a, "norms");
  NormReport r;
  r.frobenius = frobenius_norm(a);
  r.entrywise_l1 = entrywise_l1(a);
  if (r.frobenius == 0.0) return r;  // zero matrix: all-zero report
  const SvdResult svd = svd_jacobi(a);
  r.spectral = svd.sigma.empty() ? 0.0 : svd.sigma.front();
  r.nuclear = std::accumulate(svd.sigma.begin(), svd.sigma.end(), 0.0);
  return r;
}

double power_iter_spectral(const DenseMatrix& x, int iters, double eps, std::uint64_t seed) {
  require_finite(x, "power_iter_spectral");
  if (iters < 1) throw std::invalid_argument("power_iter_spectral: iters must be >= 1");
  if (!(eps > 0.0)) throw std::invalid_argument("power_iter_spectral: eps must be positive");

  const int m = x.rows();
  const int n = x.cols();
  Rng rng(seed);
  std::vector<double> v(n), u(m);
  for (double& z : v) z = rng.normal();

  auto normalize = [eps](std::vector<double>& w) {
    double s = 0.0;
    for (double z : w) s += z * z;
    s = std::sqrt(s);
    const double inv = 1.0 / (s + eps);
    for (double& z : w) z *= inv;
  };
  normalize(v);

  for (int p = 0; p < iters; ++p) {
    for (int i = 0; i < m; ++i) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += x(i, j) * v[j];
      u[i] = s;
    }
    normalize(u);
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int i = 0; i < m; ++i) s += x(i, j) * u[i];
      v[j] = s;
    }
    normalize(v);
  }

  double s2 = 0.0;
  for (int i = 0; i < m; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += x(i, j) * v[j];
    s2 += s * s;
  }
  return std::sqrt(s2);
}

DenseMatrix newton_schulz_iterate(const DenseMatrix& y0, int iters) {
  if (iters < 0) throw std::invalid_argument("newton_schulz_iterate: iters must be >= 0");
  if (y0.rows() < y0.cols()) return transpose(newton_schulz_iterate(transpose(y0), iters));
  DenseMatrix y = y0;
  const DenseMatrix eye = DenseMatrix::identity(y.cols());
  for (int k = 0; k < iters; ++k) {
    DenseMatrix gram = matmul(transpose(y), y);
    DenseMatrix poly = eye;
    poly *= 3.0;
    poly -= gram;
    y = matmul(y, poly);
    y *= 0.5;
  }
  return y;
}

DenseMatrix polar_newton_schulz(const DenseMatrix& x, int iters, double eps, NsScale scale,
                                int power_iters, std::uint64_t seed) {
  require_finite(x, "polar_newton_schulz");
  if (iters < 0) throw std::invalid_argument("polar_newton_schulz: iters must be >= 0");
  if (!(eps > 0.0)) throw std::invalid_argument("polar_newton_schulz: eps must be positive");
  if (scale == NsScale::kSpectral && power_iters < 1)
    throw std::invalid_argument("polar_newton_schulz: power_iters must be >= 1 for spectral scaling");

  const double sigma = scale == NsScale::kSpectral
                           ? power_iter_spectral(x, power_iters, eps, seed)
                           : frobenius_norm(x);
  DenseMatrix y0 = x;
  y0 *= 1.0 / std::max(sigma, eps);
  // The power-iteration estimate can undershoot, leaving ||Y0||_op slightly
  // above 1; the cubic still converges for singular values in (0, sqrt(3)).
  assert(norms(y0).spectral < 1.5);
  return newton_schulz_iterate(y0, iters);
}

DenseMatrix polar_svd(const DenseMatrix& x) {
  require_finite(x, "polar_svd");
  if (frobenius_norm(x) == 0.0) throw std::invalid_argument("polar undefined for zero matrix");
  const SvdResult svd = svd_jacobi(x);
  // Drop numerically-zero singular directions: their U columns are roundoff
  // noise and would push ||UV^T||_op above 1.
  const double cutoff = 1e-13 * svd.sigma.front();
  const int m = svd.u.rows();
  const int n = svd.v.rows();
  DenseMatrix polar(m, n);
  for (std::size_t r = 0; r < svd.sigma.size(); ++r) {
    if (svd.sigma[r] <= cutoff) break;
    for (int i = 0; i < m; ++i) {
      const double ui = svd.u(i, static_cast<int>(r));
      if (ui == 0.0) continue;
      for (int j = 0; j < n; ++j) polar(i, j) += ui * svd.v(j, static_cast<int>(r));
    }
  }
  return polar;
}

SignMatrix sign_entrywise(const DenseMatrix& a, ZeroSignPolicy policy) {
  require_finite(a, "sign_entrywise");
  SignMatrix s(a.rows(), a.cols());
  auto src = a.data();
  auto dst = s.entries();
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (src[i] > 0.0) {
      dst[i] = 1;
    } else if (src[i] < 0.0) {
      dst[i] = -1;
    } else {
      dst[i] = policy == ZeroSignPolicy::kPlusOne ? 1 : 0;
    }
  }
  return s;
}

double gram_residual(const DenseMatrix& y) {
  const DenseMatrix t = y.rows() < y.cols() ? transpose(y) : y;
  DenseMatrix gram = matmul(transpose(t), t);
  DenseMatrix resid = DenseMatrix::identity(gram.rows());
  resid -= gram;
  return norms(resid).spectral;
}

}  // namespace signmuon::linalg
