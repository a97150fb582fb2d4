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

#ifndef SIGNMUON_CORE_HARNESS_HPP
#define SIGNMUON_CORE_HARNESS_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "core/collective.hpp"
#include "core/matrix.hpp"
#include "core/optim.hpp"

namespace signmuon::harness {

// f(W) = 1/2 ||W - W*||_F^2 with f* = 0, grad f = W - W*. The spectral
// smoothness constant is min(m, n): gradient differences have nuclear norm
// at most min(m, n) times the spectral norm of the parameter difference.
struct QuadraticTask {
  DenseMatrix wstar;

  int rows() const { return wstar.rows(); }
  int cols() const { return wstar.cols(); }
  double l_star() const { return static_cast<double>(std::min(wstar.rows(), wstar.cols())); }
  double value(const DenseMatrix& w) const;
  DenseMatrix gradient(const DenseMatrix& w) const;
};

QuadraticTask make_quadratic_task(int rows, int cols, std::uint64_t seed, double scale = 1.0);
DenseMatrix sample_start_point(int rows, int cols, std::uint64_t seed, double scale = 1.0);

// Per-entry Gaussian gradient noise with variance sigma_ij^2 / batch_size,
// drawn from a (seed, worker, step) counter stream.
struct NoiseModel {
  DenseMatrix sigma;
  std::int64_t batch_size = 1;
  std::uint64_t seed = 0;

  static NoiseModel scalar(double sigma_value, int rows, int cols, std::int64_t batch_size,
                           std::uint64_t seed);
  bool is_zero() const;
  DenseMatrix sample(const DenseMatrix& grad, int worker, std::int64_t step) const;
};

struct TraceRecord {
  std::int64_t t = 0;
  double loss = 0.0;
  double l1_proxy = 0.0;  // ||grad||_1 / sqrt(mn), true gradient
  double nuclear = 0.0;   // ||grad||_*, true gradient
  double lr = 0.0;
  double bytes_sent = 0.0;  // per worker per iteration, path payload convention
  double bytes_recv = 0.0;
};

struct RunMeta {
  std::string optimizer;
  std::int64_t workers = 1;
  std::string path;  // empty for single-worker runs
  std::int64_t steps = 0;
  std::uint64_t seed = 0;
  double sigma_l1 = 0.0;
  std::int64_t batch_size = 1;
  optim::Hyperparams hp;
};

struct TrainTrace {
  std::vector<TraceRecord> records;
  RunMeta meta;
  collective::CommLedger ledger;
  double final_loss = 0.0;
};

// Thrown when an iterate goes non-finite; carries the trace prefix for
// diagnostics.
struct TrainAbort : std::runtime_error {
  TrainAbort(const std::string& msg, TrainTrace partial_in)
      : std::runtime_error(msg), partial(std::move(partial_in)) {}
  TrainTrace partial;
};

struct ExperimentSpec {
  QuadraticTask task;
  DenseMatrix start;
  NoiseModel noise;
  optim::OptimizerKind kind = optim::OptimizerKind::kSignMuon;
  std::int64_t workers = 1;
  std::optional<collective::CommPath> path;  // required when workers > 1
  std::int64_t steps = 1;
  optim::Hyperparams hp;
  std::uint64_t seed = 0;
};

TrainTrace run_experiment(const ExperimentSpec& spec);

// Arithmetic mean of the per-iteration l1 proxies.
double stationarity_metric(const TrainTrace& trace);
// Mean l1 proxy over records with t >= burn_in.
double post_burn_in_gt(const TrainTrace& trace, std::int64_t burn_in);

struct MonteCarloReport {
  double estimate = 0.0;
  double standard_error = 0.0;
  std::int64_t trials = 0;
  double analytic_bound = 0.0;
  bool pass = false;
};

// Majority-vote sign error rate for a scalar gradient g under Gaussian noise
// of s.d. sigma/sqrt(batch_size) per worker. The analytic bound is
// min(1, 2*sigma/(sqrt(M*batch_size)*|g|)); pass means the estimate stays
// within three standard errors of it.
MonteCarloReport estimate_sign_error(double g, double sigma, std::int64_t batch_size,
                                     std::int64_t workers, std::int64_t trials,
                                     std::uint64_t seed);

// One named numerical check: `estimate` against `bound` (pass iff
// estimate <= bound, with any slack already folded into the bound).
struct CheckResult {
  std::string name;
  bool pass = false;
  double estimate = 0.0;
  double bound = 0.0;
  std::string details;
};

// Random (W, D, eta) triples with ||D||_op <= 1 must satisfy the spectral
// descent inequality with slack 1e-9.
CheckResult verify_descent_lemma(int rows, int cols, std::int64_t trials, std::uint64_t seed);

// Matrices built with singular values in [sqrt(1-rho), 1]; after K cubic
// steps both the Gram residual and the distance to the exact polar factor
// must be within rho^(2^K) + 1e-8.
CheckResult verify_ns_error(double rho, int ns_iters, std::int64_t trials, std::uint64_t seed);

// Polar-direction descent with inexactness budget eps_bar: the averaged
// nuclear-norm stationarity must satisfy the inflated two-term bound.
CheckResult verify_inexact_muon(int rows, int cols, double eps_bar, std::int64_t steps,
                                std::uint64_t seed);

// On an exact-polar trajectory, wherever the contraction predicts error
// below 1e-8 at a feasible iteration count, the scaled cubic direction must
// match the SVD polar factor within 1e-6.
CheckResult verify_ns_direction_match(int rows, int cols, std::int64_t steps, std::uint64_t seed);

// Analytic gradient vs central finite differences, relative error <= 1e-6.
CheckResult verify_gradient_fd(int rows, int cols, int points, double step, std::uint64_t seed);

// G_T-vs-M scan at fixed task/noise. `mean_gt` is the post-burn-in mean per
// worker count averaged over seeds; `baseline` is the sigma=0 counterpart
// (worker-count independent); `floor_component` subtracts it.
struct FloorScan {
  std::vector<std::int64_t> workers;
  std::vector<double> mean_gt;
  std::vector<double> floor_component;
  double baseline = 0.0;
};

FloorScan noise_floor_scan(int rows, int cols, double sigma, std::int64_t batch_size,
                           const std::vector<std::int64_t>& workers, std::int64_t steps,
                           const optim::Hyperparams& hp, const std::vector<std::uint64_t>& seeds);

// Preset used by the distributed floor checks.
optim::Hyperparams noise_floor_preset();

}  // namespace signmuon::harness

#endif  // SIGNMUON_CORE_HARNESS_HPP
