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

#include "core/collective.hpp"

#include <cmath>
#include <stdexcept>

#include "core/linalg.hpp"

namespace signmuon::collective {

namespace {

void require_consistent(std::span<const SignMatrix> signs) {
  if (signs.empty()) throw std::invalid_argument("majority vote over an empty worker list");
  for (const SignMatrix& s : signs)
    if (!s.same_shape(signs.front()))
      throw std::invalid_argument("majority vote: worker sign shapes differ");
}

void require_binary(std::span<const SignMatrix> signs, const char* what) {
  for (const SignMatrix& s : signs)
    for (std::int8_t e : s.entries())
      if (e == 0) throw std::invalid_argument(std::string(what) + ": unresolved zero sign");
}

}  // namespace

void CommLedger::record(const std::string& kind, double payload, double send, double recv) {
  collective = kind;
  payload_bytes = payload;
  send_bytes = send;
  recv_bytes = recv;
  total_send_bytes += send;
  total_recv_bytes += recv;
  operations += 1;
}

VoteCounter vote_counts(std::span<const SignMatrix> signs) {
  require_consistent(signs);
  VoteCounter counter;
  counter.workers = static_cast<int>(signs.size());
  counter.sums.assign(static_cast<std::size_t>(signs.front().size()), 0);
  for (const SignMatrix& s : signs) {
    auto entries = s.entries();
    for (std::size_t i = 0; i < entries.size(); ++i) counter.sums[i] += entries[i];
  }
  return counter;
}

SignMatrix majority_vote(std::span<const SignMatrix> signs) {
  const VoteCounter counter = vote_counts(signs);
  SignMatrix out(signs.front().rows(), signs.front().cols());
  auto dst = out.entries();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = counter.sums[i] >= 0 ? 1 : -1;
  return out;
}

SignMatrix allreduce_sum_int8(std::span<const SignMatrix> signs, CommLedger& ledger) {
  require_consistent(signs);
  require_binary(signs, "allreduce_sum_int8");
  const int m = static_cast<int>(signs.size());
  if (m > 127) throw std::invalid_argument("int8 sum overflow");

  // Elementwise SUM in int8 arithmetic; |sum| <= M <= 127 so no wraparound.
  std::vector<std::int8_t> sums(static_cast<std::size_t>(signs.front().size()), 0);
  for (const SignMatrix& s : signs) {
    auto entries = s.entries();
    for (std::size_t i = 0; i < entries.size(); ++i)
      sums[i] = static_cast<std::int8_t>(sums[i] + entries[i]);
  }
  SignMatrix out(signs.front().rows(), signs.front().cols());
  auto dst = out.entries();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = sums[i] >= 0 ? 1 : -1;

  const double payload = static_cast<double>(signs.front().size());  // s8 = d bytes
  const double volume = 2.0 * (1.0 - 1.0 / m) * payload;
  ledger.record("allreduce_int8", payload, volume, volume);
  return out;
}

SignMatrix allgather_1bit(std::span<const SignMatrix> signs, CommLedger& ledger) {
  require_consistent(signs);
  const int m = static_cast<int>(signs.size());
  const std::int64_t d = signs.front().size();

  std::vector<PackedBits> gathered;
  gathered.reserve(signs.size());
  for (const SignMatrix& s : signs) gathered.push_back(pack_bits(s));

  // Every worker votes on the same gathered buffers; compute each replica's
  // result from +1 counts (sign of 2c - M) and insist they agree bitwise.
  SignMatrix reference(1, 1);
  for (int w = 0; w < m; ++w) {
    std::vector<int> plus_counts(static_cast<std::size_t>(d), 0);
    for (const PackedBits& b : gathered) {
      const SignMatrix unpacked = unpack_bits(b);
      auto entries = unpacked.entries();
      for (std::size_t i = 0; i < entries.size(); ++i)
        if (entries[i] == 1) ++plus_counts[i];
    }
    SignMatrix local(signs.front().rows(), signs.front().cols());
    auto dst = local.entries();
    for (std::size_t i = 0; i < dst.size(); ++i)
      dst[i] = (2 * plus_counts[i] - m) >= 0 ? 1 : -1;
    if (w == 0) {
      reference = std::move(local);
    } else if (!(local == reference)) {
      throw std::runtime_error("allgather_1bit: replica vote mismatch");
    }
  }

  const double payload = static_cast<double>(packed_size_bytes(d));  // s1 = ceil(d/8)
  const double volume = static_cast<double>(m - 1) * payload;
  ledger.record("allgather_1bit", payload, volume, volume);
  return reference;
}

std::pair<DenseMatrix, optim::StepRecord> distributed_step(std::span<Worker> workers,
                                                           std::span<const DenseMatrix> gradients,
                                                           const optim::Hyperparams& hp,
                                                           CommPath path, CommLedger& ledger) {
  if (workers.empty()) throw std::invalid_argument("distributed_step: no workers");
  if (workers.size() != gradients.size())
    throw std::invalid_argument("distributed_step: gradient count differs from worker count");

  const std::uint64_t checksum = content_hash(workers.front().params);
  for (const Worker& w : workers)
    if (content_hash(w.params) != checksum || !bitwise_equal(w.params, workers.front().params))
      throw std::runtime_error("replica divergence");

  const std::int64_t t = workers.front().state.step;
  std::vector<SignMatrix> local_signs;
  local_signs.reserve(workers.size());
  double grad_proxy_sum = 0.0;
  for (std::size_t m = 0; m < workers.size(); ++m) {
    Worker& w = workers[m];
    const DenseMatrix momentum = optim::momentum_update(w.params, gradients[m], w.state, hp);
    const DenseMatrix polar =
        linalg::polar_newton_schulz(momentum, hp.ns_iters, hp.stability_eps, hp.ns_scale,
                                    hp.power_iters, optim::power_iter_seed(w.state));
    // The wire format carries one bit per entry, so ties must resolve to +1
    // on this path regardless of the configured single-worker policy.
    local_signs.push_back(linalg::sign_entrywise(polar, linalg::ZeroSignPolicy::kPlusOne));
    grad_proxy_sum +=
        entrywise_l1(gradients[m]) / std::sqrt(static_cast<double>(gradients[m].size()));
  }

  const SignMatrix vote = path == CommPath::kAllreduceInt8
                              ? allreduce_sum_int8(local_signs, ledger)
                              : allgather_1bit(local_signs, ledger);

  DenseMatrix direction(vote.rows(), vote.cols());
  {
    auto src = vote.entries();
    auto dst = direction.data();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = static_cast<double>(src[i]);
  }
  if (hp.direction_mode == optim::DirectionMode::kNormalized)
    direction *= 1.0 / std::sqrt(static_cast<double>(direction.size()));

  const double lr = optim::lr_at(hp, t);
  DenseMatrix next = workers.front().params;
  axpy(-lr, direction, next);

  optim::StepRecord record;
  record.direction_l1 = entrywise_l1(direction);
  record.direction_op_norm = linalg::norms(direction).spectral;
  record.grad_l1_proxy = grad_proxy_sum / static_cast<double>(workers.size());
  record.applied_lr = lr;

  for (Worker& w : workers) {
    w.params = next;
    w.state.step += 1;
  }
  return {std::move(next), record};
}

}  // namespace signmuon::collective
