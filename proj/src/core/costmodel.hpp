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

#ifndef SIGNMUON_CORE_COSTMODEL_HPP
#define SIGNMUON_CORE_COSTMODEL_HPP

#include <cstdint>

namespace signmuon::costmodel {

enum class Topology { kRing, kTree };
enum class Collective { kAllreduce, kAllgather, kPsStar, kPsTree };

// Latency-bandwidth scenario: a message of s bytes costs alpha + beta*s.
struct AlphaBetaScenario {
  double alpha = 0.0;        // seconds per message
  double beta = 0.0;         // seconds per byte
  std::int64_t workers = 1;  // M >= 1
  std::int64_t entries = 1;  // d >= 1
  int bits_per_entry = 8;    // b in {1, 8, 32}
  Topology topology = Topology::kRing;
  Collective collective = Collective::kAllreduce;
};

struct CostBreakdown {
  double latency_seconds = 0.0;
  double bandwidth_seconds = 0.0;
  double total_seconds = 0.0;
  double payload_bytes = 0.0;
  std::int64_t rounds = 0;
  double per_worker_send_bytes = 0.0;
  double per_worker_recv_bytes = 0.0;
  double server_bytes = 0.0;  // nonzero only for the parameter-server star
};

// b=1 -> ceil(d/8); b=8 -> d; b=32 -> 4d. Throws on other b.
std::uint64_t payload_bytes(std::int64_t entries, int bits_per_entry);

// Rounds on the critical path. A single worker has no peers: 0 for every
// collective. Otherwise allreduce ring 2(M-1) / tree 2*ceil(log2 M);
// allgather ring M-1 / tree ceil(log2 M); ps_tree 2*ceil(log2 M);
// ps_star M + ceil(log2 M).
std::int64_t rounds(Collective collective, Topology topology, std::int64_t workers);

// Closed-form iteration time and volume fields for the scenario. M=1 yields
// an all-zero breakdown (no communication), with payload still reported.
CostBreakdown iter_time(const AlphaBetaScenario& scenario);

// Bandwidth-term ratio vs float32: 32/b.
double compression_factor(int bits_per_entry);

// Bandwidth-term ratio of 1-bit allgather over int8 allreduce. The closed
// form uses s1 = d/8 without the ceiling and equals exactly M/16; the ceiling
// variant uses realistic byte counts. Throws for M < 2.
double ag_over_ar_bandwidth_ratio(std::int64_t workers);
double ag_over_ar_bandwidth_ratio_ceil(std::int64_t workers, std::int64_t entries);

}  // namespace signmuon::costmodel

#endif  // SIGNMUON_CORE_COSTMODEL_HPP
