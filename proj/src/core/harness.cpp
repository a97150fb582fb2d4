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

#include "core/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "core/linalg.hpp"

namespace signmuon::harness {

namespace {

// Stream tags so task, start point and noise draws never collide.
constexpr std::uint64_t kTagTask = 0x7461736bULL;
constexpr std::uint64_t kTagStart = 0x73746172ULL;
constexpr std::uint64_t kTagNoise = 0x6e6f6973ULL;

double sqrt_size(const DenseMatrix& m) { return std::sqrt(static_cast<double>(m.size())); }

}  // namespace

double QuadraticTask::value(const DenseMatrix& w) const {
  require_same_shape(w, wstar, "task value");
  double s = 0.0;
  auto ws = w.data();
  auto ts = wstar.data();
  for (std::size_t i = 0; i < ws.size(); ++i) {
    const double d = ws[i] - ts[i];
    s += d * d;
  }
  return 0.5 * s;
}

DenseMatrix QuadraticTask::gradient(const DenseMatrix& w) const {
  require_same_shape(w, wstar, "task gradient");
  return w - wstar;
}

QuadraticTask make_quadratic_task(int rows, int cols, std::uint64_t seed, double scale) {
  Rng rng(mix_seed(seed, kTagTask));
  return QuadraticTask{DenseMatrix::gaussian(rows, cols, rng, scale)};
}

DenseMatrix sample_start_point(int rows, int cols, std::uint64_t seed, double scale) {
  Rng rng(mix_seed(seed, kTagStart));
  return DenseMatrix::gaussian(rows, cols, rng, scale);
}

NoiseModel NoiseModel::scalar(double sigma_value, int rows, int cols, std::int64_t batch_size,
                              std::uint64_t seed) {
  if (sigma_value < 0.0) throw std::invalid_argument("noise.sigma: must be nonnegative");
  if (batch_size < 1) throw std::invalid_argument("noise.batch_size: must be >= 1");
  NoiseModel n;
  n.sigma = DenseMatrix(rows, cols);
  for (double& x : n.sigma.data()) x = sigma_value;
  n.batch_size = batch_size;
  n.seed = seed;
  return n;
}

bool NoiseModel::is_zero() const {
  for (double x : sigma.data())
    if (x != 0.0) return false;
  return true;
}

DenseMatrix NoiseModel::sample(const DenseMatrix& grad, int worker, std::int64_t step) const {
  require_same_shape(grad, sigma, "noise sample");
  if (is_zero()) return grad;
  Rng rng(mix_seed(mix_seed(seed, kTagNoise),
                   mix_seed(static_cast<std::uint64_t>(worker), static_cast<std::uint64_t>(step))));
  DenseMatrix out = grad;
  auto o = out.data();
  auto s = sigma.data();
  const double inv_sqrt_nb = 1.0 / std::sqrt(static_cast<double>(batch_size));
  for (std::size_t i = 0; i < o.size(); ++i) o[i] += s[i] * inv_sqrt_nb * rng.normal();
  return out;
}

TrainTrace run_experiment(const ExperimentSpec& spec) {
  if (spec.steps < 1) throw std::invalid_argument("run.steps: must be >= 1");
  if (spec.workers < 1) throw std::invalid_argument("distributed.workers: must be >= 1");
  optim::validate(spec.hp);
  require_same_shape(spec.start, spec.task.wstar, "run_experiment");

  const bool distributed = spec.path.has_value();
  if (spec.workers > 1 && !distributed)
    throw std::invalid_argument("distributed.path: required when workers > 1");
  if (distributed && spec.kind != optim::OptimizerKind::kSignMuon &&
      spec.kind != optim::OptimizerKind::kSignSgd)
    throw std::invalid_argument(
        "optimizer.kind: distributed paths carry sign buffers; use sign_muon or signsgd");

  // signSGD over a collective is the K=0 specialization of the sign pipeline.
  optim::Hyperparams hp = spec.hp;
  if (distributed && spec.kind == optim::OptimizerKind::kSignSgd) hp.ns_iters = 0;
  // The wire format carries one bit per entry, so the distributed path always
  // resolves sign ties to +1; reflect that in the effective hyperparameters.
  if (distributed) hp.zero_sign_policy = linalg::ZeroSignPolicy::kPlusOne;

  TrainTrace trace;
  trace.meta.workers = spec.workers;
  trace.meta.steps = spec.steps;
  trace.meta.seed = spec.seed;
  trace.meta.sigma_l1 = entrywise_l1(spec.noise.sigma);
  trace.meta.batch_size = spec.noise.batch_size;
  trace.meta.hp = hp;
  switch (spec.kind) {
    case optim::OptimizerKind::kSignMuon: trace.meta.optimizer = "sign_muon"; break;
    case optim::OptimizerKind::kMuon: trace.meta.optimizer = "muon"; break;
    case optim::OptimizerKind::kSignSgd: trace.meta.optimizer = "signsgd"; break;
    case optim::OptimizerKind::kSgdMomentum: trace.meta.optimizer = "sgd_momentum"; break;
  }
  if (distributed)
    trace.meta.path =
        *spec.path == collective::CommPath::kAllreduceInt8 ? "allreduce_int8" : "allgather_1bit";
  trace.records.reserve(static_cast<std::size_t>(spec.steps));

  const std::int64_t d = spec.start.size();
  double bytes_per_iter = 0.0;
  if (distributed) {
    // Per-step accounting convention: the int8 allreduce moves a d-byte
    // payload; the 1-bit allgather moves (M-1)*ceil(d/8) bytes per worker.
    bytes_per_iter = *spec.path == collective::CommPath::kAllreduceInt8
                         ? static_cast<double>(d)
                         : static_cast<double>((spec.workers - 1) * packed_size_bytes(d));
  }

  std::vector<collective::Worker> workers;
  std::optional<optim::OptimizerState> single_state;
  DenseMatrix w = spec.start;
  const std::uint64_t polar_seed = collective::replica_polar_seed(spec.seed);
  if (distributed) {
    workers.reserve(static_cast<std::size_t>(spec.workers));
    for (std::int64_t m = 0; m < spec.workers; ++m) workers.emplace_back(w, polar_seed);
  } else {
    single_state.emplace(w.rows(), w.cols(), polar_seed);
  }

  for (std::int64_t t = 0; t < spec.steps; ++t) {
    const DenseMatrix grad = spec.task.gradient(w);
    TraceRecord rec;
    rec.t = t;
    rec.loss = spec.task.value(w);
    rec.l1_proxy = entrywise_l1(grad) / sqrt_size(grad);
    rec.lr = optim::lr_at(hp, t);
    rec.bytes_sent = bytes_per_iter;
    rec.bytes_recv = bytes_per_iter;

    // Abort before the SVD-backed metric: a diverged iterate must surface as
    // a trace-prefixed abort, not as a finiteness error from the norm kernel.
    if (!std::isfinite(rec.loss)) {
      trace.records.push_back(rec);
      std::ostringstream msg;
      msg << "non-finite loss at step " << t;
      throw TrainAbort(msg.str(), std::move(trace));
    }
    rec.nuclear = linalg::norms(grad).nuclear;
    trace.records.push_back(rec);

    if (distributed) {
      std::vector<DenseMatrix> grads;
      grads.reserve(workers.size());
      for (std::size_t m = 0; m < workers.size(); ++m)
        grads.push_back(spec.noise.sample(grad, static_cast<int>(m), t));
      auto [next, record] = collective::distributed_step(workers, grads, hp, *spec.path, trace.ledger);
      w = std::move(next);
    } else {
      const DenseMatrix noisy = spec.noise.sample(grad, 0, t);
      auto [next, record] = optim::step(spec.kind, w, noisy, *single_state, hp);
      w = std::move(next);
    }
  }
  trace.final_loss = spec.task.value(w);
  if (!std::isfinite(trace.final_loss))
    throw TrainAbort("non-finite loss at end of run", std::move(trace));
  return trace;
}

double stationarity_metric(const TrainTrace& trace) {
  if (trace.records.empty()) throw std::invalid_argument("stationarity_metric: empty trace");
  double s = 0.0;
  for (const TraceRecord& r : trace.records) s += r.l1_proxy;
  return s / static_cast<double>(trace.records.size());
}

double post_burn_in_gt(const TrainTrace& trace, std::int64_t burn_in) {
  double s = 0.0;
  std::int64_t n = 0;
  for (const TraceRecord& r : trace.records) {
    if (r.t < burn_in) continue;
    s += r.l1_proxy;
    ++n;
  }
  if (n == 0) throw std::invalid_argument("post_burn_in_gt: burn-in swallows the whole trace");
  return s / static_cast<double>(n);
}

MonteCarloReport estimate_sign_error(double g, double sigma, std::int64_t batch_size,
                                     std::int64_t workers, std::int64_t trials,
                                     std::uint64_t seed) {
  if (g == 0.0) throw std::invalid_argument("estimate_sign_error: g must be nonzero");
  if (sigma < 0.0) throw std::invalid_argument("estimate_sign_error: sigma must be nonnegative");
  if (batch_size < 1) throw std::invalid_argument("estimate_sign_error: batch_size must be >= 1");
  if (workers < 1) throw std::invalid_argument("estimate_sign_error: workers must be >= 1");
  if (trials < 10000) throw std::invalid_argument("estimate_sign_error: needs at least 1e4 trials");

  MonteCarloReport report;
  report.trials = trials;
  report.analytic_bound =
      std::min(1.0, 2.0 * sigma / (std::sqrt(static_cast<double>(workers * batch_size)) * std::fabs(g)));

  if (sigma == 0.0) {
    report.pass = true;  // noiseless signs are always correct
    return report;
  }

  const int true_sign = g > 0.0 ? 1 : -1;
  const double noise_sd = sigma / std::sqrt(static_cast<double>(batch_size));
  Rng rng(mix_seed(seed, 0x7369676eULL));
  std::int64_t wrong = 0;
  for (std::int64_t trial = 0; trial < trials; ++trial) {
    int sum = 0;
    for (std::int64_t m = 0; m < workers; ++m) {
      const double noisy = g + noise_sd * rng.normal();
      sum += noisy >= 0.0 ? 1 : -1;
    }
    const int vote = sum >= 0 ? 1 : -1;
    if (vote != true_sign) ++wrong;
  }
  report.estimate = static_cast<double>(wrong) / static_cast<double>(trials);
  report.standard_error =
      std::sqrt(report.estimate * (1.0 - report.estimate) / static_cast<double>(trials));
  report.pass = report.estimate <= report.analytic_bound + 3.0 * report.standard_error;
  return report;
}

CheckResult verify_descent_lemma(int rows, int cols, std::int64_t trials, std::uint64_t seed) {
  const QuadraticTask task = make_quadratic_task(rows, cols, seed);
  const double l_star = task.l_star();
  Rng rng(mix_seed(seed, 0x64657363ULL));

  double max_violation = -1e300;
  for (std::int64_t i = 0; i < trials; ++i) {
    const DenseMatrix w = DenseMatrix::gaussian(rows, cols, rng, 2.0);
    DenseMatrix dir = DenseMatrix::gaussian(rows, cols, rng);
    const double op = linalg::norms(dir).spectral;
    if (op > 1.0) dir *= 1.0 / op;
    const double eta = rng.uniform01() * 0.999 + 0.001;

    const DenseMatrix grad = task.gradient(w);
    DenseMatrix next = w;
    axpy(-eta, dir, next);
    const double lhs = task.value(next);
    const double rhs = task.value(w) - eta * dot(grad, dir) + 0.5 * l_star * eta * eta;
    max_violation = std::max(max_violation, lhs - rhs);
  }
  CheckResult r;
  r.name = "descent_lemma";
  r.estimate = max_violation;
  r.bound = 1e-9;
  r.pass = max_violation <= r.bound;
  std::ostringstream d;
  d << "trials=" << trials << " shape=" << rows << "x" << cols;
  r.details = d.str();
  return r;
}

namespace {

// Random matrix with orthogonal factors from a Gaussian SVD and singular
// values drawn uniformly from [lo, hi].
DenseMatrix random_with_spectrum(int rows, int cols, double lo, double hi, Rng& rng) {
  const DenseMatrix g = DenseMatrix::gaussian(rows, cols, rng);
  const linalg::SvdResult svd = linalg::svd_jacobi(g);
  const int k = static_cast<int>(svd.sigma.size());
  DenseMatrix out(rows, cols);
  for (int r = 0; r < k; ++r) {
    const double s = lo + (hi - lo) * rng.uniform01();
    for (int i = 0; i < rows; ++i) {
      const double us = svd.u(i, r) * s;
      if (us == 0.0) continue;
      for (int j = 0; j < cols; ++j) out(i, j) += us * svd.v(j, r);
    }
  }
  return out;
}

}  // namespace

CheckResult verify_ns_error(double rho, int ns_iters, std::int64_t trials, std::uint64_t seed) {
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("verify_ns_error: rho must be in (0,1)");
  if (trials < 1) throw std::invalid_argument("verify_ns_error: trials must be >= 1");
  Rng rng(mix_seed(seed, 0x6e736572ULL));

  const double bound = std::pow(rho, std::pow(2.0, ns_iters)) + 1e-8;
  double worst = 0.0;
  for (std::int64_t i = 0; i < trials; ++i) {
    const int rows = 4 + static_cast<int>(rng.next_u64() % 13);
    const int cols = 3 + static_cast<int>(rng.next_u64() % 10);
    const DenseMatrix x =
        random_with_spectrum(std::max(rows, cols), std::min(rows, cols), std::sqrt(1.0 - rho), 1.0, rng);
    const DenseMatrix y = linalg::newton_schulz_iterate(x, ns_iters);
    const double gram = linalg::gram_residual(y);
    const double polar_err = linalg::norms(y - linalg::polar_svd(x)).spectral;
    worst = std::max(worst, std::max(gram, polar_err));
  }
  CheckResult r;
  r.name = "newton_schulz_error";
  r.estimate = worst;
  r.bound = bound;
  r.pass = worst <= bound;
  std::ostringstream d;
  d << "rho=" << rho << " K=" << ns_iters << " trials=" << trials;
  r.details = d.str();
  return r;
}

namespace {

// Cubic iterations needed to push the contraction below `target` starting
// from residual rho0, or -1 if infeasible within the cap.
int ns_iters_for(double rho0, double target, int cap) {
  if (rho0 <= 0.0) return 0;
  if (rho0 >= 1.0) return -1;
  double needed = std::log(target) / std::log(rho0);  // 2^K >= needed
  double pow2 = 1.0;
  for (int k = 0; k <= cap; ++k) {
    if (pow2 >= needed) return k;
    pow2 *= 2.0;
  }
  return -1;
}

}  // namespace

CheckResult verify_inexact_muon(int rows, int cols, double eps_bar, std::int64_t steps,
                                std::uint64_t seed) {
  if (!(eps_bar >= 0.0 && eps_bar < 1.0))
    throw std::invalid_argument("verify_inexact_muon: eps_bar must lie in [0, 1)");
  const QuadraticTask task = make_quadratic_task(rows, cols, seed);
  DenseMatrix w = sample_start_point(rows, cols, mix_seed(seed, 1));
  const double l_star = task.l_star();
  const double gap = task.value(w);
  const double eta = std::sqrt(2.0 * gap / (l_star * static_cast<double>(steps)));

  double nuclear_sum = 0.0;
  double max_eps = 0.0;
  for (std::int64_t t = 0; t < steps; ++t) {
    const DenseMatrix grad = task.gradient(w);
    const DenseMatrix exact = linalg::polar_svd(grad);
    nuclear_sum += linalg::norms(grad).nuclear;

    DenseMatrix direction = exact;
    if (eps_bar > 0.0) {
      // Frobenius scaling keeps all singular values of Y0 in (0, 1], so the
      // iterate's spectral norm never exceeds 1.
      const double fro = frobenius_norm(grad);
      DenseMatrix y0 = grad;
      y0 *= 1.0 / fro;
      const double rho0 = linalg::gram_residual(y0);
      const int k = ns_iters_for(rho0, eps_bar * 0.5, 30);
      if (k >= 0) {
        DenseMatrix candidate = linalg::newton_schulz_iterate(y0, k);
        const double err = linalg::norms(candidate - exact).spectral;
        if (err <= eps_bar) {
          direction = std::move(candidate);
          max_eps = std::max(max_eps, err);
        }
        // otherwise keep the exact factor; the eps budget still holds
      }
    }
    axpy(-eta, direction, w);
  }

  const double mean_nuclear = nuclear_sum / static_cast<double>(steps);
  const double two_term = gap / (eta * static_cast<double>(steps)) + 0.5 * l_star * eta;
  CheckResult r;
  r.name = "inexact_muon_bound";
  r.estimate = mean_nuclear;
  r.bound = two_term / (1.0 - eps_bar) + 1e-6;
  r.pass = r.estimate <= r.bound;
  std::ostringstream d;
  d << "eps_bar=" << eps_bar << " T=" << steps << " eta=" << eta << " max_eps_used=" << max_eps;
  r.details = d.str();
  return r;
}

CheckResult verify_ns_direction_match(int rows, int cols, std::int64_t steps, std::uint64_t seed) {
  const QuadraticTask task = make_quadratic_task(rows, cols, seed);
  DenseMatrix w = sample_start_point(rows, cols, mix_seed(seed, 1));
  const double eta =
      std::sqrt(2.0 * task.value(w) / (task.l_star() * static_cast<double>(steps)));

  double worst = 0.0;
  std::int64_t checked = 0;
  std::int64_t skipped = 0;
  for (std::int64_t t = 0; t < steps; ++t) {
    const DenseMatrix grad = task.gradient(w);
    const DenseMatrix exact = linalg::polar_svd(grad);
    const double fro = frobenius_norm(grad);
    DenseMatrix y0 = grad;
    y0 *= 1.0 / fro;
    const int k = ns_iters_for(linalg::gram_residual(y0), 1e-8, 26);
    if (k >= 0) {
      const DenseMatrix approx = linalg::newton_schulz_iterate(y0, k);
      worst = std::max(worst, linalg::norms(approx - exact).spectral);
      ++checked;
    } else {
      ++skipped;  // near-singular gradient; contraction infeasible at the cap
    }
    axpy(-eta, exact, w);
  }
  CheckResult r;
  r.name = "ns_matches_exact_polar";
  r.estimate = worst;
  r.bound = 1e-6;
  r.pass = checked > 0 && worst <= r.bound;
  std::ostringstream d;
  d << "checked=" << checked << " skipped=" << skipped;
  r.details = d.str();
  return r;
}

CheckResult verify_gradient_fd(int rows, int cols, int points, double step, std::uint64_t seed) {
  const QuadraticTask task = make_quadratic_task(rows, cols, seed);
  Rng rng(mix_seed(seed, 0x66646966ULL));
  double max_rel = 0.0;
  for (int p = 0; p < points; ++p) {
    DenseMatrix w = DenseMatrix::gaussian(rows, cols, rng, 2.0);
    const DenseMatrix grad = task.gradient(w);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) {
        const double keep = w(i, j);
        w(i, j) = keep + step;
        const double fp = task.value(w);
        w(i, j) = keep - step;
        const double fm = task.value(w);
        w(i, j) = keep;
        const double fd = (fp - fm) / (2.0 * step);
        const double denom = std::max(1.0, std::fabs(grad(i, j)));
        max_rel = std::max(max_rel, std::fabs(fd - grad(i, j)) / denom);
      }
    }
  }
  CheckResult r;
  r.name = "gradient_finite_difference";
  r.estimate = max_rel;
  r.bound = 1e-6;
  r.pass = max_rel <= r.bound;
  std::ostringstream d;
  d << "points=" << points << " step=" << step;
  r.details = d.str();
  return r;
}

optim::Hyperparams noise_floor_preset() {
  optim::Hyperparams hp;
  hp.lr = 0.15;
  hp.momentum = 0.9;
  hp.ns_iters = 1;
  hp.ns_scale = linalg::NsScale::kSpectral;
  hp.power_iters = 2;
  hp.zero_sign_policy = linalg::ZeroSignPolicy::kPlusOne;
  return hp;
}

FloorScan noise_floor_scan(int rows, int cols, double sigma, std::int64_t batch_size,
                           const std::vector<std::int64_t>& workers, std::int64_t steps,
                           const optim::Hyperparams& hp, const std::vector<std::uint64_t>& seeds) {
  if (seeds.size() < 3) throw std::invalid_argument("noise_floor_scan: needs at least 3 seeds");
  const std::int64_t burn_in = steps / 2;

  auto mean_gt_for = [&](std::int64_t m, double sigma_value) {
    double acc = 0.0;
    for (std::uint64_t s : seeds) {
      ExperimentSpec spec;
      spec.task = make_quadratic_task(rows, cols, s);
      spec.start = sample_start_point(rows, cols, mix_seed(s, 1));
      spec.noise = NoiseModel::scalar(sigma_value, rows, cols, batch_size, mix_seed(s, 2));
      spec.kind = optim::OptimizerKind::kSignMuon;
      spec.workers = m;
      spec.path = collective::CommPath::kAllreduceInt8;
      spec.steps = steps;
      spec.hp = hp;
      spec.seed = mix_seed(s, 3);
      acc += post_burn_in_gt(run_experiment(spec), burn_in);
    }
    return acc / static_cast<double>(seeds.size());
  };

  FloorScan scan;
  scan.workers = workers;
  scan.baseline = mean_gt_for(1, 0.0);  // unanimous votes: worker count irrelevant
  for (std::int64_t m : workers) {
    const double gt = mean_gt_for(m, sigma);
    scan.mean_gt.push_back(gt);
    scan.floor_component.push_back(gt - scan.baseline);
  }
  return scan;
}

}  // namespace signmuon::harness
