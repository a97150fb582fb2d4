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

#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "core/linalg.hpp"
#include "core/matrix.hpp"

using namespace signmuon;
using linalg::NsScale;
using linalg::ZeroSignPolicy;

namespace {

DenseMatrix with_spectrum(int rows, int cols, const std::vector<double>& sv, Rng& rng) {
  const DenseMatrix g = DenseMatrix::gaussian(rows, cols, rng);
  const linalg::SvdResult svd = linalg::svd_jacobi(g);
  DenseMatrix out(rows, cols);
  for (std::size_t r = 0; r < sv.size() && r < svd.sigma.size(); ++r) {
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j)
        out(i, j) += sv[r] * svd.u(i, static_cast<int>(r)) * svd.v(j, static_cast<int>(r));
  }
  return out;
}

}  // namespace

TEST_CASE("norms: identity, zero, rank-1 row") {
  const linalg::NormReport id = linalg::norms(DenseMatrix::identity(3));
  CHECK(id.frobenius == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
  CHECK(id.entrywise_l1 == doctest::Approx(3.0));
  CHECK(id.spectral == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(id.nuclear == doctest::Approx(3.0).epsilon(1e-12));

  const linalg::NormReport zero = linalg::norms(DenseMatrix(2, 2));
  CHECK(zero.frobenius == 0.0);
  CHECK(zero.entrywise_l1 == 0.0);
  CHECK(zero.spectral == 0.0);
  CHECK(zero.nuclear == 0.0);

  const linalg::NormReport row = linalg::norms(DenseMatrix{{3.0, 4.0}});
  CHECK(row.frobenius == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(row.entrywise_l1 == doctest::Approx(7.0));
  CHECK(row.spectral == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(row.nuclear == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("norms: inequality chain on random shapes") {
  Rng rng(77);
  for (int i = 0; i < 200; ++i) {
    const int rows = 1 + static_cast<int>(rng.next_u64() % 16);
    const int cols = 1 + static_cast<int>(rng.next_u64() % 16);
    const DenseMatrix a = DenseMatrix::gaussian(rows, cols, rng);
    const linalg::NormReport n = linalg::norms(a);
    const double sqrt_d = std::sqrt(static_cast<double>(a.size()));
    CHECK(n.entrywise_l1 / sqrt_d <= n.frobenius * (1.0 + 1e-12) + 1e-12);
    CHECK(n.frobenius <= n.nuclear * (1.0 + 1e-12) + 1e-12);
    CHECK(n.spectral <= n.frobenius * (1.0 + 1e-12) + 1e-12);
  }
}

TEST_CASE("norms rejects non-finite input") {
  DenseMatrix a(2, 2);
  a(0, 1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(linalg::norms(a), std::invalid_argument);
}

TEST_CASE("svd_jacobi: reconstruction and orthonormal factors") {
  Rng rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const int rows = 2 + static_cast<int>(rng.next_u64() % 12);
    const int cols = 2 + static_cast<int>(rng.next_u64() % 12);
    const DenseMatrix x = DenseMatrix::gaussian(rows, cols, rng);
    const linalg::SvdResult svd = linalg::svd_jacobi(x);

    // singular values sorted descending and nonnegative
    for (std::size_t i = 0; i + 1 < svd.sigma.size(); ++i) {
      CHECK(svd.sigma[i] >= svd.sigma[i + 1]);
      CHECK(svd.sigma[i] >= 0.0);
    }
    // X = U diag(sigma) V^T
    DenseMatrix recon(rows, cols);
    for (std::size_t r = 0; r < svd.sigma.size(); ++r)
      for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
          recon(i, j) += svd.sigma[r] * svd.u(i, static_cast<int>(r)) * svd.v(j, static_cast<int>(r));
    CHECK(frobenius_norm(recon - x) <= 1e-10 * std::max(1.0, frobenius_norm(x)));

    // V^T V = I (and U^T U = I on the nonzero block)
    const DenseMatrix vtv = matmul(transpose(svd.v), svd.v);
    for (int i = 0; i < vtv.rows(); ++i)
      for (int j = 0; j < vtv.cols(); ++j)
        CHECK(std::fabs(vtv(i, j) - (i == j ? 1.0 : 0.0)) <= 1e-10);
  }
}

TEST_CASE("power_iter_spectral: diagonal oracle, identity, zero") {
  const DenseMatrix d31 = DenseMatrix::diag({3.0, 1.0});
  const double svd_spectral = linalg::norms(d31).spectral;
  const double est = linalg::power_iter_spectral(d31, 20, 1e-12, 42);
  CHECK(std::fabs(est - svd_spectral) <= 1e-6);
  CHECK(std::fabs(est - 3.0) <= 1e-6);

  for (int p : {1, 3, 7})
    CHECK(linalg::power_iter_spectral(DenseMatrix::identity(4), p, 1e-12, 7) ==
          doctest::Approx(1.0).epsilon(1e-9));

  CHECK(linalg::power_iter_spectral(DenseMatrix(3, 2), 5, 1e-9, 3) == 0.0);
}

TEST_CASE("power_iter_spectral: deterministic, monotone, never above spectral") {
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const DenseMatrix x = DenseMatrix::gaussian(6, 9, rng);
    const double spectral = linalg::norms(x).spectral;
    const std::uint64_t seed = rng.next_u64();
    CHECK(linalg::power_iter_spectral(x, 9, 1e-12, seed) ==
          linalg::power_iter_spectral(x, 9, 1e-12, seed));
    double prev = -1.0;
    for (int p = 1; p <= 16; ++p) {
      const double est = linalg::power_iter_spectral(x, p, 1e-12, seed);
      CHECK(est <= spectral + 1e-9);
      CHECK(est >= prev - 1e-12);
      prev = est;
    }
  }
}

TEST_CASE("polar_newton_schulz: identity is a fixed point under spectral scaling") {
  for (int k : {0, 1, 3, 9}) {
    const DenseMatrix y =
        linalg::polar_newton_schulz(DenseMatrix::identity(4), k, 1e-12, NsScale::kSpectral, 10, 1);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        CHECK(std::fabs(y(i, j) - (i == j ? 1.0 : 0.0)) <= 1e-9);
  }
  // Frobenius scaling shrinks the identity to I/sqrt(n) first; the cubic
  // recovers it once K is past the transient.
  const DenseMatrix y =
      linalg::polar_newton_schulz(DenseMatrix::identity(4), 8, 1e-12, NsScale::kFro, 1, 1);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(std::fabs(y(i, j) - (i == j ? 1.0 : 0.0)) <= 1e-9);
}

TEST_CASE("polar_newton_schulz: one Frobenius-scaled step on diag(2,-1)") {
  const DenseMatrix x = DenseMatrix::diag({2.0, -1.0});
  const DenseMatrix y = linalg::polar_newton_schulz(x, 1, 1e-12, NsScale::kFro, 1, 0);
  // sigma = sqrt(5); one cubic step on the scaled diagonal
  const double s5 = std::sqrt(5.0);
  CHECK(y(0, 0) == doctest::Approx(11.0 / (5.0 * s5)).epsilon(1e-9));
  CHECK(y(1, 1) == doctest::Approx(-7.0 / (5.0 * s5)).epsilon(1e-9));
  CHECK(y(0, 0) == doctest::Approx(0.98387).epsilon(1e-4));
  CHECK(y(1, 1) == doctest::Approx(-0.62610).epsilon(1e-4));
  CHECK(y(0, 1) == 0.0);
  CHECK(y(1, 0) == 0.0);
}

TEST_CASE("polar_newton_schulz: zero input returns zero, K=0 returns scaled input") {
  const DenseMatrix z = linalg::polar_newton_schulz(DenseMatrix(3, 2), 4, 1e-12, NsScale::kFro, 1, 0);
  CHECK(frobenius_norm(z) == 0.0);

  const DenseMatrix x = DenseMatrix::diag({4.0, 2.0});
  const DenseMatrix y0 = linalg::polar_newton_schulz(x, 0, 1e-12, NsScale::kFro, 1, 0);
  const double fro = std::sqrt(20.0);
  CHECK(y0(0, 0) == doctest::Approx(4.0 / fro).epsilon(1e-12));
  CHECK(y0(1, 1) == doctest::Approx(2.0 / fro).epsilon(1e-12));
}

TEST_CASE("polar_newton_schulz: converges to the SVD polar factor") {
  Rng rng(23);
  std::vector<double> sv;
  for (int i = 0; i < 5; ++i) sv.push_back(0.5 + 0.5 * rng.uniform01());
  const DenseMatrix x = with_spectrum(8, 5, sv, rng);
  const DenseMatrix ns = linalg::polar_newton_schulz(x, 8, 1e-12, NsScale::kSpectral, 30, 9);
  const DenseMatrix exact = linalg::polar_svd(x);
  CHECK(linalg::norms(ns - exact).spectral <= 1e-6);

  // Wide input takes the transposed route and must agree as well.
  const DenseMatrix xt = transpose(x);
  const DenseMatrix ns_wide = linalg::polar_newton_schulz(xt, 8, 1e-12, NsScale::kSpectral, 30, 9);
  CHECK(linalg::norms(ns_wide - linalg::polar_svd(xt)).spectral <= 1e-6);
}

TEST_CASE("newton_schulz_iterate: quadratic contraction of the Gram residual") {
  Rng rng(31);
  std::vector<double> sv;
  for (int i = 0; i < 6; ++i) sv.push_back(std::sqrt(1.0 - 0.9) + (1.0 - std::sqrt(0.1)) * rng.uniform01());
  const DenseMatrix x = with_spectrum(9, 6, sv, rng);
  const double rho = linalg::gram_residual(x);
  REQUIRE(rho < 0.9 + 1e-9);
  for (int k = 1; k <= 6; ++k) {
    const DenseMatrix y = linalg::newton_schulz_iterate(x, k);
    CHECK(linalg::gram_residual(y) <= std::pow(rho, std::pow(2.0, k)) + 1e-8);
  }
}

TEST_CASE("polar_svd: diagonal, rotation, nuclear attainment, zero rejection") {
  const DenseMatrix p = linalg::polar_svd(DenseMatrix::diag({3.0, 2.0}));
  CHECK(p(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::fabs(p(0, 1)) <= 1e-12);
  CHECK(std::fabs(p(1, 0)) <= 1e-12);

  const double c = std::cos(0.7), s = std::sin(0.7);
  const DenseMatrix rot{{c, -s}, {s, c}};
  const DenseMatrix pr = linalg::polar_svd(rot);
  CHECK(frobenius_norm(pr - rot) <= 1e-10);

  Rng rng(3);
  const DenseMatrix g = DenseMatrix::gaussian(4, 3, rng);
  const linalg::NormReport n = linalg::norms(g);
  CHECK(std::fabs(dot(g, linalg::polar_svd(g)) - n.nuclear) <= 1e-10 * n.nuclear);

  CHECK_THROWS_WITH_AS(linalg::polar_svd(DenseMatrix(2, 3)), "polar undefined for zero matrix",
                       std::invalid_argument);
}

TEST_CASE("polar_svd: unit spectral norm and idempotence") {
  Rng rng(13);
  for (int trial = 0; trial < 25; ++trial) {
    const int rows = 2 + static_cast<int>(rng.next_u64() % 10);
    const int cols = 2 + static_cast<int>(rng.next_u64() % 10);
    const DenseMatrix x = DenseMatrix::gaussian(rows, cols, rng);
    const DenseMatrix p = linalg::polar_svd(x);
    CHECK(std::fabs(linalg::norms(p).spectral - 1.0) <= 1e-10);
    const DenseMatrix pp = linalg::polar_svd(p);
    double gap = 0.0;
    for (std::size_t i = 0; i < p.data().size(); ++i)
      gap = std::max(gap, std::fabs(p.data()[i] - pp.data()[i]));
    CHECK(gap <= 1e-9);
  }
}

TEST_CASE("sign_entrywise: zero policies") {
  const DenseMatrix a{{2.5, 0.0}, {-0.1, 7.0}};
  const SignMatrix sz = linalg::sign_entrywise(a, ZeroSignPolicy::kZero);
  CHECK(sz(0, 0) == 1);
  CHECK(sz(0, 1) == 0);
  CHECK(sz(1, 0) == -1);
  CHECK(sz(1, 1) == 1);

  const SignMatrix sp = linalg::sign_entrywise(a, ZeroSignPolicy::kPlusOne);
  CHECK(sp(0, 1) == 1);
  CHECK(sp(1, 0) == -1);

  const SignMatrix zeros = linalg::sign_entrywise(DenseMatrix(2, 3), ZeroSignPolicy::kPlusOne);
  for (auto e : zeros.entries()) CHECK(e == 1);
}
