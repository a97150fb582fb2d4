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

#include "core/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace signmuon::optim {

namespace {

constexpr double kPi = 3.14159265358979323846;

DenseMatrix sign_to_dense(const SignMatrix& s) {
  DenseMatrix d(s.rows(), s.cols());
  auto src = s.entries();
  auto dst = d.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = static_cast<double>(src[i]);
  return d;
}

StepRecord make_record(const DenseMatrix& direction, const DenseMatrix& g, double lr) {
  StepRecord r;
  r.direction_l1 = entrywise_l1(direction);
  r.direction_op_norm = linalg::norms(direction).spectral;
  r.grad_l1_proxy = entrywise_l1(g) / std::sqrt(static_cast<double>(g.size()));
  r.applied_lr = lr;
  return r;
}

std::pair<DenseMatrix, StepRecord> apply_direction(const DenseMatrix& w, const DenseMatrix& g,
                                                   DenseMatrix direction, OptimizerState& state,
                                                   const Hyperparams& hp) {
  const double lr = lr_at(hp, state.step);
  StepRecord record = make_record(direction, g, lr);
  DenseMatrix next = w;
  axpy(-lr, direction, next);
  state.step += 1;
  return {std::move(next), record};
}

}  // namespace

void validate(const Hyperparams& hp) {
  if (!(hp.lr > 0.0)) throw std::invalid_argument("optimizer.lr: must be positive");
  if (hp.min_lr < 0.0) throw std::invalid_argument("optimizer.min_lr: must be nonnegative");
  if (hp.lr_schedule == LrSchedule::kCosine && hp.schedule_horizon < 1)
    throw std::invalid_argument("optimizer.schedule_horizon: cosine schedule needs a positive horizon");
  if (!(hp.momentum >= 0.0 && hp.momentum < 1.0))
    throw std::invalid_argument("optimizer.momentum: must lie in [0, 1)");
  if (hp.weight_decay < 0.0) throw std::invalid_argument("optimizer.weight_decay: must be nonnegative");
  if (hp.ns_iters < 0) throw std::invalid_argument("optimizer.ns_iters: must be >= 0");
  if (!(hp.stability_eps > 0.0)) throw std::invalid_argument("optimizer.eps: must be positive");
  if (hp.power_iters < 1) throw std::invalid_argument("optimizer.power_iters: must be >= 1");
}

double lr_at(const Hyperparams& hp, std::int64_t t) {
  if (hp.lr_schedule == LrSchedule::kConstant || hp.schedule_horizon <= 0) return hp.lr;
  const double frac = std::min(1.0, static_cast<double>(t) / hp.schedule_horizon);
  return hp.min_lr + 0.5 * (hp.lr - hp.min_lr) * (1.0 + std::cos(kPi * frac));
}

DenseMatrix momentum_update(const DenseMatrix& w, const DenseMatrix& g, OptimizerState& state,
                            const Hyperparams& hp) {
  require_same_shape(w, g, "optimizer step");
  require_same_shape(w, state.momentum, "optimizer step");
  require_finite(g, "optimizer step");
  DenseMatrix decayed = g;
  if (hp.weight_decay != 0.0) axpy(hp.weight_decay, w, decayed);
  state.momentum *= hp.momentum;
  axpy(1.0 - hp.momentum, decayed, state.momentum);
  return state.momentum;
}

std::uint64_t power_iter_seed(const OptimizerState& state) {
  return mix_seed(state.seed, static_cast<std::uint64_t>(state.step));
}

std::pair<DenseMatrix, StepRecord> step_sign_muon(const DenseMatrix& w, const DenseMatrix& g,
                                                  OptimizerState& state, const Hyperparams& hp) {
  const DenseMatrix momentum = momentum_update(w, g, state, hp);
  const DenseMatrix polar =
      linalg::polar_newton_schulz(momentum, hp.ns_iters, hp.stability_eps, hp.ns_scale,
                                  hp.power_iters, power_iter_seed(state));
  DenseMatrix direction = sign_to_dense(linalg::sign_entrywise(polar, hp.zero_sign_policy));
  if (hp.direction_mode == DirectionMode::kNormalized)
    direction *= 1.0 / std::sqrt(static_cast<double>(direction.size()));
  return apply_direction(w, g, std::move(direction), state, hp);
}

std::pair<DenseMatrix, StepRecord> step_muon(const DenseMatrix& w, const DenseMatrix& g,
                                             OptimizerState& state, const Hyperparams& hp) {
  const DenseMatrix momentum = momentum_update(w, g, state, hp);
  DenseMatrix direction =
      linalg::polar_newton_schulz(momentum, hp.ns_iters, hp.stability_eps, hp.ns_scale,
                                  hp.power_iters, power_iter_seed(state));
  return apply_direction(w, g, std::move(direction), state, hp);
}

std::pair<DenseMatrix, StepRecord> step_signsgd(const DenseMatrix& w, const DenseMatrix& g,
                                                OptimizerState& state, const Hyperparams& hp) {
  const DenseMatrix momentum = momentum_update(w, g, state, hp);
  DenseMatrix direction = sign_to_dense(linalg::sign_entrywise(momentum, hp.zero_sign_policy));
  if (hp.direction_mode == DirectionMode::kNormalized)
    direction *= 1.0 / std::sqrt(static_cast<double>(direction.size()));
  return apply_direction(w, g, std::move(direction), state, hp);
}

std::pair<DenseMatrix, StepRecord> step_sgd_momentum(const DenseMatrix& w, const DenseMatrix& g,
                                                     OptimizerState& state, const Hyperparams& hp) {
  require_same_shape(w, g, "optimizer step");
  require_same_shape(w, state.momentum, "optimizer step");
  require_finite(g, "optimizer step");
  DenseMatrix decayed = g;
  if (hp.weight_decay != 0.0) axpy(hp.weight_decay, w, decayed);
  state.momentum *= hp.momentum;
  state.momentum += decayed;  // heavy ball: no (1 - beta) damping
  return apply_direction(w, g, state.momentum, state, hp);
}

std::pair<DenseMatrix, StepRecord> step(OptimizerKind kind, const DenseMatrix& w,
                                        const DenseMatrix& g, OptimizerState& state,
                                        const Hyperparams& hp) {
  switch (kind) {
    case OptimizerKind::kSignMuon: return step_sign_muon(w, g, state, hp);
    case OptimizerKind::kMuon: return step_muon(w, g, state, hp);
    case OptimizerKind::kSignSgd: return step_signsgd(w, g, state, hp);
    case OptimizerKind::kSgdMomentum: return step_sgd_momentum(w, g, state, hp);
  }
  throw std::invalid_argument("unknown optimizer kind");
}

}  // namespace signmuon::optim
