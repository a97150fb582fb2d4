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

#include <cstdio>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include "core/collective.hpp"
#include "core/harness.hpp"
#include "core/linalg.hpp"
#include "core/signs.hpp"

using namespace signmuon;

namespace {

SignMatrix row_signs(std::initializer_list<int> entries) {
  SignMatrix s(1, static_cast<int>(entries.size()));
  int j = 0;
  for (int e : entries) s(0, j++) = static_cast<std::int8_t>(e);
  return s;
}

std::vector<SignMatrix> random_worker_signs(int m, int d, Rng& rng) {
  std::vector<SignMatrix> signs;
  for (int w = 0; w < m; ++w) {
    SignMatrix s(1, d);
    for (auto& e : s.entries()) e = (rng.next_u64() & 1) ? 1 : -1;
    signs.push_back(std::move(s));
  }
  return signs;
}

}  // namespace

TEST_CASE("majority_vote: strict majority, tie to +1, single voter") {
  std::vector<SignMatrix> v1{row_signs({1}), row_signs({1}), row_signs({-1})};
  CHECK(collective::majority_vote(v1)(0, 0) == 1);

  std::vector<SignMatrix> v2{row_signs({1}), row_signs({-1})};
  CHECK(collective::majority_vote(v2)(0, 0) == 1);

  SignMatrix with_zero(1, 3);
  with_zero(0, 0) = -1;
  with_zero(0, 1) = 0;
  with_zero(0, 2) = 1;
  std::vector<SignMatrix> v3{with_zero};
  const SignMatrix out = collective::majority_vote(v3);
  CHECK(out(0, 0) == -1);
  CHECK(out(0, 1) == 1);  // zero entry resolves to +1
  CHECK(out(0, 2) == 1);

  std::vector<SignMatrix> empty;
  CHECK_THROWS_AS(collective::majority_vote(empty), std::invalid_argument);
  std::vector<SignMatrix> mismatched{row_signs({1, 1}), row_signs({1})};
  CHECK_THROWS_AS(collective::majority_vote(mismatched), std::invalid_argument);
}

TEST_CASE("vote counter parity invariant") {
  Rng rng(123);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 1 + static_cast<int>(rng.next_u64() % 9);
    const auto signs = random_worker_signs(m, 17, rng);
    const collective::VoteCounter counter = collective::vote_counts(signs);
    CHECK(counter.workers == m);
    CHECK(counter.parity_consistent());
  }
}

TEST_CASE("allreduce_sum_int8: entrywise sums and ledger volumes") {
  std::vector<SignMatrix> signs{row_signs({1, 1, -1, 1}), row_signs({1, -1, -1, 1}),
                                row_signs({-1, 1, -1, 1})};
  collective::CommLedger ledger;
  const SignMatrix vote = collective::allreduce_sum_int8(signs, ledger);
  CHECK(vote(0, 0) == 1);
  CHECK(vote(0, 1) == 1);
  CHECK(vote(0, 2) == -1);
  CHECK(vote(0, 3) == 1);
  CHECK(ledger.payload_bytes == 4.0);
  CHECK(ledger.send_bytes == doctest::Approx(2.0 * (2.0 / 3.0) * 4.0));

  // M=1: degenerate volume formula
  std::vector<SignMatrix> solo{row_signs({1, -1})};
  collective::CommLedger l1;
  const SignMatrix same = collective::allreduce_sum_int8(solo, l1);
  CHECK(same == solo[0]);
  CHECK(l1.send_bytes == 0.0);
  CHECK(l1.recv_bytes == 0.0);

  // M=4, d=1000: per-worker send volume 1500 bytes
  Rng rng(5);
  auto many = random_worker_signs(4, 1000, rng);
  collective::CommLedger l4;
  (void)collective::allreduce_sum_int8(many, l4);
  CHECK(l4.send_bytes == doctest::Approx(1500.0));

  // int8 guard
  Rng rng2(6);
  auto too_many = random_worker_signs(128, 1, rng2);
  collective::CommLedger lg;
  CHECK_THROWS_WITH_AS(collective::allreduce_sum_int8(too_many, lg), "int8 sum overflow",
                       std::invalid_argument);
}

TEST_CASE("pack_bits: LSB-first encoding with zero padding") {
  SignMatrix all_plus(1, 8);
  for (auto& e : all_plus.entries()) e = 1;
  CHECK(pack_bits(all_plus).bytes == std::vector<std::uint8_t>{0xFF});

  SignMatrix all_minus(1, 8);
  for (auto& e : all_minus.entries()) e = -1;
  CHECK(pack_bits(all_minus).bytes == std::vector<std::uint8_t>{0x00});

  const PackedBits three = pack_bits(row_signs({1, -1, 1}));
  CHECK(three.bytes == std::vector<std::uint8_t>{0x05});
  CHECK(three.logical_len == 3);

  CHECK_THROWS_WITH_AS(pack_bits(row_signs({1, 0, -1})), "unresolved zero sign",
                       std::invalid_argument);
}

TEST_CASE("unpack_bits: inverse of pack, corrupt padding detected") {
  PackedBits one;
  one.bytes = {0x01};
  one.logical_len = 1;
  CHECK(unpack_bits(one)(0, 0) == 1);

  PackedBits five;
  five.bytes = {0x00};
  five.logical_len = 5;
  const SignMatrix minus = unpack_bits(five);
  for (auto e : minus.entries()) CHECK(e == -1);

  PackedBits corrupt;
  corrupt.bytes = {0xFF};  // bits 5..7 are padding for d=5
  corrupt.logical_len = 5;
  CHECK_THROWS_WITH_AS(unpack_bits(corrupt), "corrupt packed buffer", std::invalid_argument);

  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + static_cast<int>(rng.next_u64() % 257);
    SignMatrix s(1, d);
    for (auto& e : s.entries()) e = (rng.next_u64() & 1) ? 1 : -1;
    const PackedBits packed = pack_bits(s);
    CHECK(static_cast<std::int64_t>(packed.bytes.size()) == (d + 7) / 8);
    CHECK(unpack_bits(packed) == s);
  }
}

TEST_CASE("canonical wire format: little-endian length header") {
  const PackedBits packed = pack_bits(row_signs({1, -1, 1}));
  const auto wire = packed_to_wire(packed);
  REQUIRE(wire.size() == 9);
  CHECK(wire[0] == 3);  // d = 3, little-endian
  for (int i = 1; i < 8; ++i) CHECK(wire[i] == 0);
  CHECK(wire[8] == 0x05);

  const PackedBits back = packed_from_wire(wire);
  CHECK(back.logical_len == 3);
  CHECK(unpack_bits(back) == row_signs({1, -1, 1}));

  auto truncated = wire;
  truncated.pop_back();
  CHECK_THROWS_AS(packed_from_wire(truncated), std::invalid_argument);

  const std::string path = (std::filesystem::temp_directory_path() / "sm_packed_test.bin").string();
  write_packed_file(path, packed);
  const PackedBits from_file = read_packed_file(path);
  CHECK(unpack_bits(from_file) == row_signs({1, -1, 1}));
  std::remove(path.c_str());
}

TEST_CASE("allgather_1bit: vote identity, volumes, equivalence with allreduce") {
  Rng rng(9);
  // c_i = 3 of M = 5 -> sign(2*3-5) = +1
  std::vector<SignMatrix> signs{row_signs({1}), row_signs({1}), row_signs({1}), row_signs({-1}),
                                row_signs({-1})};
  collective::CommLedger ledger;
  CHECK(collective::allgather_1bit(signs, ledger)(0, 0) == 1);

  auto wide = random_worker_signs(5, 16, rng);
  collective::CommLedger l16;
  (void)collective::allgather_1bit(wide, l16);
  CHECK(l16.send_bytes == doctest::Approx(8.0));  // (M-1) * ceil(16/8)
  CHECK(l16.payload_bytes == doctest::Approx(2.0));

  for (int trial = 0; trial < 100; ++trial) {
    const int m = 1 + static_cast<int>(rng.next_u64() % 8);
    const int d = 1 + static_cast<int>(rng.next_u64() % 64);
    const auto s = random_worker_signs(m, d, rng);
    collective::CommLedger la, lb;
    CHECK(collective::allgather_1bit(s, la) == collective::allreduce_sum_int8(s, lb));
  }
}

TEST_CASE("distributed_step: unanimous gradients match the single-worker result") {
  const harness::QuadraticTask task = harness::make_quadratic_task(4, 5, 11);
  optim::Hyperparams hp = harness::noise_floor_preset();

  DenseMatrix w0 = harness::sample_start_point(4, 5, 12);
  const DenseMatrix g = task.gradient(w0);

  // M = 3, all workers see the same gradient
  const std::uint64_t polar_seed = collective::replica_polar_seed(99);
  std::vector<collective::Worker> team;
  for (int i = 0; i < 3; ++i) team.emplace_back(w0, polar_seed);
  std::vector<DenseMatrix> grads{g, g, g};
  collective::CommLedger ledger;
  auto [w_team, r_team] = collective::distributed_step(team, grads, hp,
                                                       collective::CommPath::kAllreduceInt8, ledger);

  // M = 1 with the same replica stream
  std::vector<collective::Worker> solo;
  solo.emplace_back(w0, polar_seed);
  std::vector<DenseMatrix> solo_grads{g};
  collective::CommLedger l1;
  auto [w_solo, r_solo] = collective::distributed_step(solo, solo_grads, hp,
                                                       collective::CommPath::kAllreduceInt8, l1);

  CHECK(bitwise_equal(w_team, w_solo));
  for (const auto& worker : team) CHECK(bitwise_equal(worker.params, w_team));
}

TEST_CASE("distributed_step: both paths produce bit-identical parameters") {
  const harness::QuadraticTask task = harness::make_quadratic_task(6, 6, 21);
  const harness::NoiseModel noise = harness::NoiseModel::scalar(1.0, 6, 6, 1, 22);
  optim::Hyperparams hp = harness::noise_floor_preset();

  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    DenseMatrix w_ar = harness::sample_start_point(6, 6, seed);
    DenseMatrix w_ag = w_ar;
    std::vector<collective::Worker> team_ar, team_ag;
    const std::uint64_t polar_seed = collective::replica_polar_seed(seed);
    for (int i = 0; i < 5; ++i) {
      team_ar.emplace_back(w_ar, polar_seed);
      team_ag.emplace_back(w_ag, polar_seed);
    }
    collective::CommLedger la, lb;
    for (int t = 0; t < 40; ++t) {
      std::vector<DenseMatrix> grads;
      for (int i = 0; i < 5; ++i) grads.push_back(noise.sample(task.gradient(w_ar), i, t));
      w_ar = collective::distributed_step(team_ar, grads, hp, collective::CommPath::kAllreduceInt8, la)
                 .first;
      w_ag = collective::distributed_step(team_ag, grads, hp, collective::CommPath::kAllgather1Bit, lb)
                 .first;
      CHECK(bitwise_equal(w_ar, w_ag));
    }
  }
}

TEST_CASE("distributed_step: replica divergence and input validation") {
  optim::Hyperparams hp = harness::noise_floor_preset();
  Rng rng(31);
  DenseMatrix w = DenseMatrix::gaussian(3, 3, rng);

  std::vector<collective::Worker> team;
  team.emplace_back(w, 1);
  team.emplace_back(w, 2);
  team[1].params(0, 0) += 1e-9;  // silently corrupted replica
  std::vector<DenseMatrix> grads{DenseMatrix::gaussian(3, 3, rng), DenseMatrix::gaussian(3, 3, rng)};
  collective::CommLedger ledger;
  CHECK_THROWS_WITH_AS(
      collective::distributed_step(team, grads, hp, collective::CommPath::kAllreduceInt8, ledger),
      "replica divergence", std::runtime_error);

  std::vector<collective::Worker> ok;
  ok.emplace_back(w, 1);
  std::vector<DenseMatrix> too_many{DenseMatrix(3, 3), DenseMatrix(3, 3)};
  CHECK_THROWS_AS(
      collective::distributed_step(ok, too_many, hp, collective::CommPath::kAllreduceInt8, ledger),
      std::invalid_argument);
}
