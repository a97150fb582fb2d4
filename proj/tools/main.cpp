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
//
// Command-line front end. Exit codes: 0 success, 1 runtime or verification
// failure, 2 invalid configuration or flags.

#include <cinttypes>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "signmuon/signmuon.h"

namespace {

int status_to_exit(sm_status status) {
  switch (status) {
    case SM_OK: return 0;
    case SM_ERROR_INVALID_ARGUMENT:
    case SM_ERROR_CONFIG: return 2;
    default: return 1;
  }
}

int run_train(const std::string& config_path, const std::string& out_dir) {
  char* summary = nullptr;
  const sm_status status =
      sm_train_run(config_path.c_str(), out_dir.empty() ? nullptr : out_dir.c_str(), &summary);
  if (status != SM_OK) {
    std::fprintf(stderr, "train: %s\n", sm_last_error());
    return status_to_exit(status);
  }
  std::printf("%s\n", summary);
  sm_string_free(summary);
  return 0;
}

struct CostFlags {
  double alpha = 0.0;
  double beta = 0.0;
  std::int64_t workers = 1;
  std::int64_t entries = 1;
  int bits = 8;
  std::string topology = "ring";
  std::string collective = "allreduce";
  std::string sweep_workers;  // "lo:hi"
  bool ag_vs_ar = false;
};

bool parse_collective(const std::string& name, sm_collective* out) {
  if (name == "allreduce") *out = SM_COLLECTIVE_ALLREDUCE;
  else if (name == "allgather") *out = SM_COLLECTIVE_ALLGATHER;
  else if (name == "ps_star") *out = SM_COLLECTIVE_PS_STAR;
  else if (name == "ps_tree") *out = SM_COLLECTIVE_PS_TREE;
  else return false;
  return true;
}

int print_breakdown_row(const CostFlags& flags, std::int64_t workers, bool header) {
  sm_collective collective;
  if (!parse_collective(flags.collective, &collective)) {
    std::fprintf(stderr, "costmodel: unknown collective '%s'\n", flags.collective.c_str());
    return 2;
  }
  sm_cost_scenario scenario{};
  scenario.alpha = flags.alpha;
  scenario.beta = flags.beta;
  scenario.workers = workers;
  scenario.entries = flags.entries;
  scenario.bits_per_entry = flags.bits;
  scenario.topology = flags.topology == "tree" ? SM_TOPOLOGY_TREE : SM_TOPOLOGY_RING;
  scenario.collective = collective;

  sm_cost_breakdown b{};
  const sm_status status = sm_cost_iter_time(&scenario, &b);
  if (status != SM_OK) {
    std::fprintf(stderr, "costmodel: %s\n", sm_last_error());
    return status_to_exit(status);
  }
  if (header)
    std::printf(
        "collective\ttopology\tworkers\tentries\tbits\tpayload_bytes\trounds\tlatency_s\t"
        "bandwidth_s\ttotal_s\tsend_bytes\trecv_bytes\tserver_bytes\n");
  std::printf("%s\t%s\t%" PRId64 "\t%" PRId64 "\t%d\t%.0f\t%" PRId64 "\t%.9g\t%.9g\t%.9g\t%.9g\t%.9g\t%.9g\n",
              flags.collective.c_str(), flags.topology.c_str(), workers, flags.entries, flags.bits,
              b.payload_bytes, b.rounds, b.latency_seconds, b.bandwidth_seconds, b.total_seconds,
              b.per_worker_send_bytes, b.per_worker_recv_bytes, b.server_bytes);
  return 0;
}

int run_costmodel(const CostFlags& flags) {
  std::int64_t lo = flags.workers;
  std::int64_t hi = flags.workers;
  if (!flags.sweep_workers.empty()) {
    const auto colon = flags.sweep_workers.find(':');
    if (colon == std::string::npos) {
      std::fprintf(stderr, "costmodel: --sweep-workers expects lo:hi\n");
      return 2;
    }
    try {
      lo = std::stoll(flags.sweep_workers.substr(0, colon));
      hi = std::stoll(flags.sweep_workers.substr(colon + 1));
    } catch (const std::exception&) {
      std::fprintf(stderr, "costmodel: --sweep-workers expects lo:hi integers\n");
      return 2;
    }
    if (lo < 1 || hi < lo) {
      std::fprintf(stderr, "costmodel: --sweep-workers expects 1 <= lo <= hi\n");
      return 2;
    }
  }

  if (flags.ag_vs_ar) {
    std::printf("workers\tratio_closed_form\tratio_ceiling\n");
    std::int64_t break_even = -1;
    for (std::int64_t m = std::max<std::int64_t>(lo, 2); m <= hi; ++m) {
      double closed = 0.0, ceil_ratio = 0.0;
      if (sm_cost_ag_over_ar_ratio(m, &closed) != SM_OK ||
          sm_cost_ag_over_ar_ratio_ceil(m, flags.entries, &ceil_ratio) != SM_OK) {
        std::fprintf(stderr, "costmodel: %s\n", sm_last_error());
        return 1;
      }
      if (break_even < 0 && closed >= 1.0) break_even = m;
      std::printf("%" PRId64 "\t%.9g\t%.9g\n", m, closed, ceil_ratio);
    }
    if (break_even >= 0)
      std::printf("# break-even (closed form reaches 1.0) at workers=%" PRId64 "\n", break_even);
    return 0;
  }

  bool header = true;
  for (std::int64_t m = lo; m <= hi; ++m) {
    const int rc = print_breakdown_row(flags, m, header);
    if (rc != 0) return rc;
    header = false;
  }
  return 0;
}

void print_line(const char* line, void*) { std::printf("%s\n", line); }

int run_verify(const std::string& suite, std::uint64_t seed, int jobs) {
  int all_passed = 0;
  const sm_status status = sm_verify_run(suite.c_str(), seed, jobs, print_line, nullptr, &all_passed);
  if (status != SM_OK) {
    std::fprintf(stderr, "verify: %s\n", sm_last_error());
    return status_to_exit(status);
  }
  return all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"signmuon: 1-bit matrix-aware sign descent toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  CLI::App* train = app.add_subcommand("train", "run one configured experiment");
  train->add_option("--config", config_path, "config file (TOML-style sections)")->required();
  train->add_option("--out", out_dir, "override run.out_dir");

  CostFlags cost;
  CLI::App* costmodel = app.add_subcommand("costmodel", "evaluate the alpha-beta cost model");
  costmodel->add_option("--alpha", cost.alpha, "seconds per message");
  costmodel->add_option("--beta", cost.beta, "seconds per byte");
  costmodel->add_option("--workers,-M", cost.workers, "worker count");
  costmodel->add_option("--entries,-d", cost.entries, "communicated entry count");
  costmodel->add_option("--bits", cost.bits, "bits per entry (1, 8, 32)");
  costmodel->add_option("--topology", cost.topology, "ring or tree");
  costmodel->add_option("--collective", cost.collective, "allreduce, allgather, ps_star, ps_tree");
  costmodel->add_option("--sweep-workers", cost.sweep_workers, "sweep worker count, lo:hi");
  costmodel->add_flag("--ag-vs-ar", cost.ag_vs_ar, "print 1-bit allgather vs int8 allreduce ratios");

  std::string suite = "all";
  std::uint64_t seed = 1;
  int jobs = 1;
  CLI::App* verify = app.add_subcommand("verify", "run the numerical verification suites");
  verify->add_option("--suite", suite, "linalg, collective, bounds or all");
  verify->add_option("--seed", seed, "base seed");
  verify->add_option("--jobs", jobs, "thread count for suite sharding");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (train->parsed()) return run_train(config_path, out_dir);
  if (costmodel->parsed()) return run_costmodel(cost);
  if (verify->parsed()) return run_verify(suite, seed, jobs);
  return 2;
}
