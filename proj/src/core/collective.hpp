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

#ifndef SIGNMUON_CORE_COLLECTIVE_HPP
#define SIGNMUON_CORE_COLLECTIVE_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "core/matrix.hpp"
#include "core/optim.hpp"
#include "core/signs.hpp"

namespace signmuon::collective {

enum class CommPath { kAllreduceInt8, kAllgather1Bit };

// Per-entry integer vote sums. With M all-plus-minus-one voters every sum
// lies in [-M, M] and has the parity of M.
struct VoteCounter {
  std::vector<int> sums;
  int workers = 0;

  bool parity_consistent() const {
    for (int s : sums)
      if (((s - workers) % 2 + 2) % 2 != 0 || s < -workers || s > workers) return false;
    return true;
  }
};

// Simulated per-worker communication accounting. `payload_bytes` is the
// buffer each worker contributes; send/recv volumes follow the alpha-beta
// closed forms (allreduce: 2(1-1/M)s8, allgather: (M-1)s1).
struct CommLedger {
  std::string collective;
  double payload_bytes = 0.0;
  double send_bytes = 0.0;  // per worker, last operation
  double recv_bytes = 0.0;
  double total_send_bytes = 0.0;  // per worker, accumulated
  double total_recv_bytes = 0.0;
  std::int64_t operations = 0;

  void record(const std::string& kind, double payload, double send, double recv);
};

// Entrywise sign of the per-entry sum; ties (sum 0) resolve to +1.
// Throws on an empty list or shape mismatch.
SignMatrix majority_vote(std::span<const SignMatrix> signs);

VoteCounter vote_counts(std::span<const SignMatrix> signs);

// SUM allreduce over int8 sign buffers followed by local thresholding.
// Requires entries in {-1, +1} and M <= 127 (the int8 sum range).
SignMatrix allreduce_sum_int8(std::span<const SignMatrix> signs, CommLedger& ledger);

// 1-bit packed allgather: every worker packs, gathers all M buffers, unpacks
// and votes locally via the +1-count identity sign(2c - M). All workers'
// results are bit-identical.
SignMatrix allgather_1bit(std::span<const SignMatrix> signs, CommLedger& ledger);

// One synchronous data-parallel step. All workers must hold bit-identical
// parameters (checked; throws "replica divergence" otherwise). Each worker
// runs the local pipeline (decay, momentum, Newton-Schulz polar, sign with
// ties to +1), the signs are aggregated over `path`, and every worker applies
// the identical update.
struct Worker {
  DenseMatrix params;
  optim::OptimizerState state;

  Worker(DenseMatrix params_in, std::uint64_t seed)
      : params(std::move(params_in)), state(params.rows(), params.cols(), seed) {}
};

std::pair<DenseMatrix, optim::StepRecord> distributed_step(std::span<Worker> workers,
                                                           std::span<const DenseMatrix> gradients,
                                                           const optim::Hyperparams& hp,
                                                           CommPath path, CommLedger& ledger);

// Stream seed for the polar step inside replicas. Deliberately shared across
// workers: replicas with identical momenta must emit identical signs, so a
// unanimous vote reproduces the single-worker step bit for bit. Gradient
// noise, by contrast, is drawn from worker-indexed streams.
inline std::uint64_t replica_polar_seed(std::uint64_t base) {
  return mix_seed(base, 0x706f6c61ULL);
}

}  // namespace signmuon::collective

#endif  // SIGNMUON_CORE_COLLECTIVE_HPP
