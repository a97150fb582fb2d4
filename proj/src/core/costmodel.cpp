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

#include "core/costmodel.hpp"

#include <stdexcept>

namespace signmuon::costmodel {

namespace {

std::int64_t ceil_log2(std::int64_t m) {
  std::int64_t r = 0;
  std::int64_t p = 1;
  while (p < m) {
    p <<= 1;
    ++r;
  }
  return r;
}

}  // namespace

std::uint64_t payload_bytes(std::int64_t entries, int bits_per_entry) {
  if (entries < 1) throw std::invalid_argument("payload_bytes: entry count must be >= 1");
  const auto d = static_cast<std::uint64_t>(entries);
  switch (bits_per_entry) {
    case 1: return (d + 7) / 8;
    case 8: return d;
    case 32: return 4 * d;
    default: throw std::invalid_argument("payload_bytes: bits per entry must be 1, 8 or 32");
  }
}

std::int64_t rounds(Collective collective, Topology topology, std::int64_t workers) {
  if (workers < 1) throw std::invalid_argument("rounds: worker count must be >= 1");
  if (workers == 1) return 0;  // no peers
  const std::int64_t log2m = ceil_log2(workers);
  switch (collective) {
    case Collective::kAllreduce:
      return topology == Topology::kRing ? 2 * (workers - 1) : 2 * log2m;
    case Collective::kAllgather:
      return topology == Topology::kRing ? workers - 1 : log2m;
    case Collective::kPsTree:
      return 2 * log2m;
    case Collective::kPsStar:
      return workers + log2m;  // serial uplink + tree broadcast
  }
  throw std::invalid_argument("rounds: unknown collective");
}

CostBreakdown iter_time(const AlphaBetaScenario& scenario) {
  if (scenario.alpha < 0.0 || scenario.beta < 0.0)
    throw std::invalid_argument("iter_time: alpha and beta must be nonnegative");
  const double s = static_cast<double>(payload_bytes(scenario.entries, scenario.bits_per_entry));
  const double m = static_cast<double>(scenario.workers);

  CostBreakdown out;
  out.payload_bytes = s;
  if (scenario.workers == 1) return out;  // lone worker communicates nothing

  out.rounds = rounds(scenario.collective, scenario.topology, scenario.workers);
  out.latency_seconds = scenario.alpha * static_cast<double>(out.rounds);
  switch (scenario.collective) {
    case Collective::kAllreduce: {
      const double vol = 2.0 * (1.0 - 1.0 / m) * s;
      out.bandwidth_seconds = vol * scenario.beta;
      out.per_worker_send_bytes = vol;
      out.per_worker_recv_bytes = vol;
      break;
    }
    case Collective::kAllgather: {
      const double vol = (m - 1.0) * s;
      out.bandwidth_seconds = vol * scenario.beta;
      out.per_worker_send_bytes = vol;
      out.per_worker_recv_bytes = vol;
      break;
    }
    case Collective::kPsStar: {
      // M uplink messages received serially at the server, then a pipelined
      // broadcast of the aggregated buffer.
      out.bandwidth_seconds = (m + 1.0) * s * scenario.beta;
      out.per_worker_send_bytes = s;
      out.per_worker_recv_bytes = s;
      out.server_bytes = 2.0 * m * s;
      break;
    }
    case Collective::kPsTree: {
      out.bandwidth_seconds = 2.0 * s * scenario.beta;
      out.per_worker_send_bytes = s;
      out.per_worker_recv_bytes = s;
      break;
    }
  }
  out.total_seconds = out.latency_seconds + out.bandwidth_seconds;
  return out;
}

double compression_factor(int bits_per_entry) {
  switch (bits_per_entry) {
    case 1: return 32.0;
    case 8: return 4.0;
    case 32: return 1.0;
    default: throw std::invalid_argument("compression_factor: bits per entry must be 1, 8 or 32");
  }
}

double ag_over_ar_bandwidth_ratio(std::int64_t workers) {
  if (workers < 2) throw std::invalid_argument("ag_over_ar_bandwidth_ratio: needs at least 2 workers");
  return static_cast<double>(workers) / 16.0;
}

double ag_over_ar_bandwidth_ratio_ceil(std::int64_t workers, std::int64_t entries) {
  if (workers < 2) throw std::invalid_argument("ag_over_ar_bandwidth_ratio: needs at least 2 workers");
  if (entries < 1) throw std::invalid_argument("ag_over_ar_bandwidth_ratio: entry count must be >= 1");
  const double m = static_cast<double>(workers);
  const double s1 = static_cast<double>(payload_bytes(entries, 1));
  const double s8 = static_cast<double>(payload_bytes(entries, 8));
  return (m - 1.0) * s1 / (2.0 * (1.0 - 1.0 / m) * s8);
}

}  // namespace signmuon::costmodel
