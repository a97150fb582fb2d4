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

#ifndef SIGNMUON_CORE_OPTIM_HPP
#define SIGNMUON_CORE_OPTIM_HPP

#include <cstdint>
#include <utility>

#include "core/linalg.hpp"
#include "core/matrix.hpp"

namespace signmuon::optim {

enum class LrSchedule { kConstant, kCosine };
enum class DirectionMode { kRawSign, kNormalized };
enum class OptimizerKind { kSignMuon, kMuon, kSignSgd, kSgdMomentum };

struct Hyperparams {
  double lr = 0.1;
  LrSchedule lr_schedule = LrSchedule::kConstant;
  double min_lr = 0.0;          // cosine floor
  int schedule_horizon = 0;     // cosine period; <= 0 means constant
  double momentum = 0.0;        // beta in [0, 1)
  double weight_decay = 0.0;    // lambda >= 0
  int ns_iters = 1;             // K >= 0
  double stability_eps = 1e-12; // eps > 0
  linalg::NsScale ns_scale = linalg::NsScale::kSpectral;
  int power_iters = 2;          // P >= 1
  DirectionMode direction_mode = DirectionMode::kRawSign;
  linalg::ZeroSignPolicy zero_sign_policy = linalg::ZeroSignPolicy::kZero;
};

// Throws std::invalid_argument naming the offending field.
void validate(const Hyperparams& hp);

// Stepsize at step t; pure function of t.
double lr_at(const Hyperparams& hp, std::int64_t t);

// Per-block state: momentum buffer (M0 = 0), step counter, and the RNG seed
// that feeds the per-step power-iteration stream.
struct OptimizerState {
  DenseMatrix momentum;
  std::int64_t step = 0;
  std::uint64_t seed = 0;

  OptimizerState(int rows, int cols, std::uint64_t seed_in)
      : momentum(rows, cols), seed(seed_in) {}
};

struct StepRecord {
  double direction_l1 = 0.0;
  double direction_op_norm = 0.0;
  double grad_l1_proxy = 0.0;  // ||G||_1 / sqrt(mn) of the incoming gradient
  double applied_lr = 0.0;
};

// One Sign-Muon step: decayed gradient -> momentum EMA -> Newton-Schulz polar
// -> entrywise sign (optionally normalized by sqrt(mn)). Updates state in
// place and returns the new iterate.
std::pair<DenseMatrix, StepRecord> step_sign_muon(const DenseMatrix& w, const DenseMatrix& g,
                                                  OptimizerState& state, const Hyperparams& hp);

// Muon step: the Newton-Schulz polar output is the direction (no sign).
std::pair<DenseMatrix, StepRecord> step_muon(const DenseMatrix& w, const DenseMatrix& g,
                                             OptimizerState& state, const Hyperparams& hp);

// signSGD with momentum: sign of the momentum EMA; beta = 0 is classic.
std::pair<DenseMatrix, StepRecord> step_signsgd(const DenseMatrix& w, const DenseMatrix& g,
                                                OptimizerState& state, const Hyperparams& hp);

// Heavy-ball SGD: M <- beta*M + G~, W <- W - lr*M.
std::pair<DenseMatrix, StepRecord> step_sgd_momentum(const DenseMatrix& w, const DenseMatrix& g,
                                                     OptimizerState& state, const Hyperparams& hp);

std::pair<DenseMatrix, StepRecord> step(OptimizerKind kind, const DenseMatrix& w,
                                        const DenseMatrix& g, OptimizerState& state,
                                        const Hyperparams& hp);

// Momentum-and-decay front end shared by all steppers:
// G~ = G + lambda*W, M <- beta*M + (1-beta)*G~. Returns the updated momentum.
DenseMatrix momentum_update(const DenseMatrix& w, const DenseMatrix& g, OptimizerState& state,
                            const Hyperparams& hp);

// Per-step seed for the power-iteration stream inside the polar step.
std::uint64_t power_iter_seed(const OptimizerState& state);

}  // namespace signmuon::optim

#endif  // SIGNMUON_CORE_OPTIM_HPP
